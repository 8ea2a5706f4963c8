import math
import os
import sys
import tempfile


def format_float(value: float) -> str:
    """
    Function formats number with 12 significant digits.
    :param value: number.
    :return: text.
    """

    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.12g}"


def get_dir_name() -> str:
    """
    Function returns path to directory with executable file or code files.
    :return: path to directory.
    """

    if getattr(sys, "frozen", False):
        path = os.path.dirname(os.path.abspath(sys.executable))
    else:
        path = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    return path


def write_text_atomic(path: str, text: str) -> None:
    """
    Function writes text to file so that readers never see a partially written file.
    :param path: path to file;
    :param text: text to write.
    """

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    descriptor, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    try:
        with os.fdopen(descriptor, "w", encoding="utf-8", newline="") as file:
            file.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
