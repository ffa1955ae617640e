""" Utilities for dealing with collection objects (lists, dicts) and configs """
from typing import Callable, Mapping, Sequence
import functools

import hydra
from omegaconf import DictConfig, ListConfig, OmegaConf

from src.effects.errors import UnknownName


def is_list(x):
    return isinstance(x, Sequence) and not isinstance(x, str)


def is_dict(x):
    return isinstance(x, Mapping)


def to_list(x, recursive=False):
    """Convert an object to list.

    If Sequence (e.g. list, tuple, Listconfig): just return it

    Special case: If non-recursive and not a list, wrap in list
    """
    if is_list(x):
        if recursive:
            return [to_list(_x) for _x in x]
        else:
            return list(x)
    else:
        if recursive:
            return x
        else:
            return [x]


def to_container(x):
    """Plain python containers from (possibly nested) DictConfig / ListConfig"""
    if isinstance(x, (DictConfig, ListConfig)):
        return OmegaConf.to_container(x, resolve=True)
    return x


def resolve_target(registry, name):
    if name not in registry:
        raise UnknownName(f"'{name}' is not one of {sorted(registry)}", name=name)
    target = registry[name]
    # Retrieve the right constructor automatically based on type
    if isinstance(target, str):
        return hydra.utils.get_method(path=target)
    elif isinstance(target, Callable):
        return target
    raise NotImplementedError("instantiate target must be string or callable")


def instantiate(registry, config, *args, partial=False, **kwargs):
    """
    registry: Dictionary mapping names to functions or target paths (e.g. {'axioms': 'src.audit.suites.AxiomSuite'})
    config: Dictionary with a '_name_' key indicating which element of the registry to grab, and kwargs to be passed
        into the target; a bare string is a name without kwargs
    *args, **kwargs: additional arguments to override the config to pass into the target constructor
    """
    # Case 1: no config
    if config is None:
        return None
    # Case 2a: string means _name_ was overloaded
    if isinstance(config, str):
        name, config = config, {}
    # Case 2b: grab the desired callable from name, leaving the caller's config untouched
    else:
        config = dict(to_container(config))
        name = config.pop("_name_")

    fn = resolve_target(registry, name)
    obj = functools.partial(fn, *args, **{**config, **kwargs})
    return obj if partial else obj()


def omegaconf_filter_keys(d, fn=None):
    """Only keep keys where fn(key) is True. Support nested DictConfig."""
    if fn is None:
        fn = lambda _: True
    if is_list(d):
        return ListConfig([omegaconf_filter_keys(v, fn) for v in d])
    elif is_dict(d):
        return DictConfig(
            {k: omegaconf_filter_keys(v, fn) for k, v in d.items() if fn(k)}
        )
    else:
        return d
