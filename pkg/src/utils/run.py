""" Utils for the command loop: logging, config post-processing and pretty-printing """
import logging
import warnings

import rich.syntax
import rich.tree
from omegaconf import DictConfig, OmegaConf
from rich.console import Console
from rich.logging import RichHandler

from src.utils.config import omegaconf_filter_keys


def get_logger(name=__name__, level=None) -> logging.Logger:
    """Module logger; the level is left to the root handler unless given"""
    logger = logging.getLogger(name)
    if level is not None:
        logger.setLevel(level)
    return logger


def setup_logging(level=logging.INFO, console=None):
    """Route all package logs through a single rich handler on stderr"""
    handler = RichHandler(console=console or Console(stderr=True), show_path=False, markup=False)
    root = logging.getLogger("src")
    root.handlers = [handler]
    root.setLevel(level)
    root.propagate = False
    return root


def process_config(config: DictConfig) -> DictConfig:
    """A couple of optional utilities, controlled by main config file:
    - disabling warnings
    - easier access to debug mode
    - forcing debug friendly configuration
    Args:
        config (DictConfig): Configuration composed by Hydra.
    """
    log = get_logger()

    # Filter out keys that were used just for interpolation
    config = omegaconf_filter_keys(config, lambda k: not str(k).startswith("__"))

    # enable adding new keys to config
    OmegaConf.set_struct(config, False)

    # disable python warnings if <config.ignore_warnings=True>
    if config.get("ignore_warnings"):
        log.info("Disabling python warnings! <config.ignore_warnings=True>")
        warnings.filterwarnings("ignore")

    # debug mode: verbose logs, single worker, no progress bars
    if config.get("debug"):
        log.info("Running in debug mode! <config.debug=True>")
        logging.getLogger("src").setLevel(logging.DEBUG)
        config.audit.workers = 1
        config.audit.progress = False

    return config


def print_config(config: DictConfig, resolve: bool = True, console=None) -> None:
    """Prints content of DictConfig using Rich library and its tree structure.
    Args:
        config (DictConfig): Configuration composed by Hydra.
        resolve (bool, optional): Whether to resolve reference fields of DictConfig.
    """

    style = "dim"
    tree = rich.tree.Tree("CONFIG", style=style, guide_style=style)

    for field in config.keys():
        branch = tree.add(field, style=style, guide_style=style)

        config_section = config.get(field)
        branch_content = str(config_section)
        if isinstance(config_section, DictConfig):
            branch_content = OmegaConf.to_yaml(config_section, resolve=resolve)

        branch.add(rich.syntax.Syntax(branch_content, "yaml"))

    (console or Console(stderr=True)).print(tree)
