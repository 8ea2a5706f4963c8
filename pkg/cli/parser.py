import argparse
import sys
from typing import List, NoReturn, Optional
from cli.config_data import Defaults
from cli.version import VERSION
from stochsched.instance import Family


POLICIES: List[str] = ["rsos", "dsos", "sos", "ga-rsos", "ga-dsos", "ga-sos"]
COMPARATORS: List[str] = ["auto", "surrogate", "mean-busy", "lp"]


class ArgumentParser(argparse.ArgumentParser):
    """
    Parser that exits with code 1 on usage errors.
    """

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: ошибка: {message}\n")


def _non_negative_float(value: str) -> float:
    number = float(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"value must be non-negative, got {value}")
    return number


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"value must be positive, got {value}")
    return number


def _add_curves_parser(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("curves", help="таблицы гарантий как функции Delta")
    parser.add_argument("--start", type=_non_negative_float, default=0.0, help="начало диапазона Delta")
    parser.add_argument("--stop", type=_non_negative_float, default=2.0, help="конец диапазона Delta")
    parser.add_argument("--step", type=float, default=0.01, help="шаг сетки Delta")
    parser.add_argument("--misspec-step", type=float, default=0.25,
                        help="шаг сетки для таблицы неверно оцененной Delta")
    parser.add_argument("--out", default=".", help="папка для CSV-файлов")


def _add_generate_parser(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("generate", help="сгенерировать случайный экземпляр задачи")
    parser.add_argument("--n", type=_positive_int, required=True, help="число работ")
    parser.add_argument("--m", type=_positive_int, default=1, help="число машин")
    parser.add_argument("--family", choices=[family.value for family in Family], default=Family.EXPONENTIAL.value,
                        help="семейство распределений")
    parser.add_argument("--delta", type=_non_negative_float, default=None,
                        help="целевой квадрат коэффициента вариации")
    parser.add_argument("--even-integer", action="store_true",
                        help="четные целые средние и даты поступления (для LP)")
    parser.add_argument("--seed", type=int, default=None, help="зерно генератора")
    parser.add_argument("--out", default=None, help="файл экземпляра (по умолчанию stdout)")


def _add_run_parser(subparsers: argparse._SubParsersAction, defaults: Defaults) -> None:
    parser = subparsers.add_parser("run", help="оценить политику методом Монте-Карло")
    parser.add_argument("instances", nargs="+", help="файлы экземпляров")
    parser.add_argument("--policy", choices=POLICIES, required=True, help="политика")
    parser.add_argument("--alpha", type=float, default=None, help="alpha для политики sos")
    parser.add_argument("--delta", type=_non_negative_float, default=None,
                        help="Delta, для которой настраивается alpha или плотность")
    parser.add_argument("--nbue-delta", type=float, default=None, help="параметр delta-NBUE для политики sos")
    parser.add_argument("--density", default=None,
                        help="плотность для rsos: uniform, fdelta или путь к JSON со ступенчатой плотностью")
    parser.add_argument("--reps", type=_positive_int, default=defaults.reps, help="число повторений")
    parser.add_argument("--seed", type=int, default=defaults.seed, help="базовое зерно")
    parser.add_argument("--comparator", choices=COMPARATORS, default=defaults.comparator,
                        help="нижняя оценка для сравнения")
    parser.add_argument("--busy-times", action="store_true",
                        help="сравнивать средние моменты занятости вместо моментов завершения")
    parser.add_argument("--lp-cap", type=_positive_int, default=defaults.lp_cap, help="предел горизонта LP")
    parser.add_argument("--out", default=None, help="CSV с результатами (по умолчанию stdout)")
    parser.add_argument("--trace", default=None, help="CSV с трассой назначения работ на машины")


def create_parser(defaults: Defaults) -> argparse.ArgumentParser:
    """
    Function creates parser of command line arguments.
    :param defaults: default values from config file.
    :return: parser.
    """

    parser = ArgumentParser(prog="soslab", description="Стохастическое онлайн-расписание по альфа-точкам")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("--verbose", action="store_true", help="подробный журнал")
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_generate_parser(subparsers)
    _add_run_parser(subparsers, defaults)
    _add_curves_parser(subparsers)

    certify = subparsers.add_parser("certify", help="построить и проверить двойственный сертификат")
    certify.add_argument("instance", help="файл экземпляра")
    certify.add_argument("--lp-cap", type=_positive_int, default=defaults.lp_cap, help="предел горизонта LP")
    certify.add_argument("--export-lp", default=None, help="записать LP в формате MPS")
    certify.add_argument("--out", default=None, help="файл отчета (по умолчанию stdout)")

    check = subparsers.add_parser("check-density", help="проверить условия для ступенчатой плотности")
    check.add_argument("density", help="JSON-файл со ступенчатой плотностью")
    check.add_argument("--c", type=float, default=None, help="проверяемая гарантия (по умолчанию из файла)")
    check.add_argument("--delta", type=_non_negative_float, default=None, help="оценка Delta")
    check.add_argument("--nbue-delta", type=float, default=None, help="параметр delta-NBUE")
    check.add_argument("--grid", type=_positive_int, default=10 ** 4, help="размер сетки")

    config = subparsers.add_parser("config", help="работа с файлом config.ini")
    config.add_argument("--write-defaults", action="store_true", help="записать значения по умолчанию")
    return parser


def parse_args(defaults: Defaults, argv: Optional[List[str]] = None) -> argparse.Namespace:
    return create_parser(defaults).parse_args(argv)
