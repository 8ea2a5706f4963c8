import logging
import os
from configparser import ConfigParser
from dataclasses import dataclass
from typing import Dict, Optional
from cli.utils import get_dir_name


CONFIG_PATH: str = os.path.join(get_dir_name(), "config.ini")
DEFAULT_CONFIG_DATA: Dict[str, str] = {"reps": "1000",
                                       "seed": "0",
                                       "comparator": "auto",
                                       "lp_cap": "400",
                                       "threads": "1"}
THREADS_VARIABLE: str = "SOSLAB_THREADS"


@dataclass
class Defaults:
    reps: int
    seed: int
    comparator: str
    lp_cap: int
    threads: int


def _read_int(config_parser: ConfigParser, key: str) -> int:
    """
    Function reads integer value from MAIN section.
    :param config_parser: config parser;
    :param key: name of value.
    :return: value, fallback if value is not integer.
    """

    try:
        return config_parser.getint("MAIN", key, fallback=int(DEFAULT_CONFIG_DATA[key]))
    except ValueError:
        logging.warning("Value of '%s' in config file is not integer, default %s is used", key,
                        DEFAULT_CONFIG_DATA[key])
        return int(DEFAULT_CONFIG_DATA[key])


def _read_threads(config_parser: ConfigParser) -> int:
    threads = _read_int(config_parser, "threads")
    env_value = os.environ.get(THREADS_VARIABLE)
    if env_value:
        try:
            threads = int(env_value)
        except ValueError:
            logging.warning("%s=%s is not integer and is ignored", THREADS_VARIABLE, env_value)
    return max(1, threads)


def read_config_file(path: Optional[str] = None) -> Defaults:
    """
    Function reads defaults from config file. Missing file, section or values are replaced by fallbacks.
    :param path: path to config file.
    :return: defaults.
    """

    config_parser = ConfigParser()
    try:
        config_parser.read(path or CONFIG_PATH, encoding="utf-8")
    except Exception:
        logging.error("Failed to read config file")
    if not config_parser.has_section("MAIN"):
        logging.warning("There are no default run parameters in config file")
        config_parser.add_section("MAIN")
    comparator = config_parser.get("MAIN", "comparator", fallback=DEFAULT_CONFIG_DATA["comparator"])
    return Defaults(_read_int(config_parser, "reps"), _read_int(config_parser, "seed"), comparator,
                    _read_int(config_parser, "lp_cap"), _read_threads(config_parser))


def save_config_file(default_data: Optional[Dict[str, str]] = None, path: Optional[str] = None) -> str:
    """
    Function saves default run parameters to config file.
    :param default_data: dictionary with values, built-in defaults if not given;
    :param path: path to config file.
    :return: path to saved file.
    """

    config_parser = ConfigParser()
    config_parser.add_section("MAIN")
    for key, value in (default_data or DEFAULT_CONFIG_DATA).items():
        config_parser.set("MAIN", key, str(value))
    path = path or CONFIG_PATH
    with open(path, "w", encoding="utf-8") as file:
        config_parser.write(file)
    logging.debug("Defaults saved to config file %s", path)
    return path
