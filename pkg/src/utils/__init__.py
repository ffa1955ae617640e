from .config import is_list, is_dict, to_list, to_container, instantiate
