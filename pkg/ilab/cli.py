"""
Front end de línea de comandos del laboratorio de interpolación.

Ejecuta un experimento registrado con la configuración combinada
(config.yaml + --config + --set + --seed), escribe el reporte de forma atómica
y devuelve un código de salida según el resultado:

    0  todos los umbrales de aceptación se cumplen
    2  algún umbral falla
    3  el solver no certificó una factorización (FAILED-CERTIFICATION)
    4  configuración inválida
"""

import argparse
import logging
import sys
from typing import List, Optional

from .config_validator import get_validated_config, parse_overrides, print_config_summary
from .errors import ConfigError
from .experiments import list_experiments, run_experiment
from .reports import EXIT_CONFIG_ERROR, print_summary, write_report

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ilab",
        description="Laboratorio de interpolación compleja en dimensión finita",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Ejemplos de uso:
  python -m ilab list
  python -m ilab list lorentz
  python -m ilab lp-family
  python -m ilab weighted-trivial --set dim=16 --set weights_count=2
  python -m ilab aparam-table --set space=Tsirelson2 --set n_max=16 --format csv
  python -m ilab reiteration --config mi_experimento.yaml --out results/reit.json --seed 3
  ILAB_THREADS=4 python -m ilab fragmented-kp -v
        """
    )
    parser.add_argument(
        "experiment",
        help="Nombre del experimento, o 'list' para ver el catálogo"
    )
    parser.add_argument(
        "filter",
        nargs="?",
        default="",
        help="Con 'list': texto para filtrar el catálogo"
    )
    parser.add_argument(
        "--config",
        default=None,
        help="Archivo YAML plano (clave: valor) con parámetros del experimento"
    )
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Sobrescribe un parámetro (repetible); el valor se interpreta como escalar YAML"
    )
    parser.add_argument(
        "--out",
        default=None,
        help="Ruta del reporte (default: <output_dir>/<experimento>.<formato>)"
    )
    parser.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        help="Formato del reporte (default: json)"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Semilla; tiene prioridad sobre --config y --set"
    )
    parser.add_argument(
        "--show-config",
        action="store_true",
        help="Imprimir la configuración activa antes de ejecutar"
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Logging a nivel DEBUG"
    )
    return parser


def _print_catalog(filter_text: str) -> None:
    entries = list_experiments(filter_text)
    print("=== EXPERIMENTOS ===")
    for name, summary in entries:
        print(f"  {name:<24} {summary}")
    if not entries:
        print(f"  (ninguno coincide con '{filter_text}')")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )

    if args.experiment == "list":
        _print_catalog(args.filter)
        return 0

    try:
        raw_text = ""
        if args.config:
            try:
                with open(args.config, "r", encoding="utf-8") as f:
                    raw_text = f.read()
            except OSError as e:
                raise ConfigError(f"Archivo {args.config} no encontrado o ilegible: {e}", field="--config") from e
        overrides = parse_overrides(args.set)
        if args.seed is not None:
            overrides["seed"] = args.seed
        cfg = get_validated_config(raw_text, args.experiment, overrides)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    if args.show_config:
        print_config_summary(cfg)

    report = run_experiment(cfg)
    path = write_report(report, args.out, args.format)
    print_summary(report)
    print(f"Reporte: {path}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
