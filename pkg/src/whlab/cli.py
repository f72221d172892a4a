"""Command line front-end: ``whlab factorise | verify | simulate | lemma-checks``.

Exit codes
----------
0  success, every check passed
1  input/output or validation error (nothing written)
2  factorisation error (nothing written)
3  uniqueness rejection: the candidate pair is not the ladder pair
4  a lemma surrogate failed
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FactorisationError, ParameterError, WHLabError
from .lattice import DefectiveLaw, StepLaw
from .montecarlo import compare_laws, simulate_ladder_samples
from .spectral import spectral_factorise
from .uniqueness import run_lab, verify_factorisation

log = logging.getLogger("whlab")

EXIT_OK, EXIT_INPUT, EXIT_FACTORISATION, EXIT_REJECTED, EXIT_LEMMA = 0, 1, 2, 3, 4
REJECTION_CHECKS = ("identity", "uniqueness", "scaling", "ratio")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Path
    killing: float = 1.0
    grid: int = 1024
    seed: int = 0
    trunc: int = 10_000
    out: Path | None = None
    tol: float = 1e-9
    factors: Path | None = None
    kind: str = "strict"
    samples: int = 100_000
    t_max: int = 10**6
    csv: Path | None = None

    def validate(self):
        if not 0.0 < self.killing <= 1.0:
            raise ParameterError(f"--killing {self.killing} outside (0, 1]")
        g = self.grid
        if g < 64 or g > 2**16 or g & (g - 1):
            raise ParameterError(f"--grid {g} must be a power of two in [64, 65536]")
        if self.trunc < 100:
            raise ParameterError("--trunc must be at least 100")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("--seed must be an unsigned 64-bit integer")


def _read_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def load_walk(path: Path) -> StepLaw:
    return StepLaw.from_json(_read_json(path))


def load_factors(path: Path) -> tuple[DefectiveLaw, DefectiveLaw]:
    obj = _read_json(path)
    try:
        return DefectiveLaw.from_json(obj["ascending"]), DefectiveLaw.from_json(obj["descending"])
    except KeyError as exc:
        raise InputError(f"{path} lacks the {exc.args[0]!r} factor") from None


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        write_atomic(cfg.out, text)


def _roots(arr) -> list:
    return [[float(z.real), float(z.imag)] for z in np.sort_complex(np.asarray(arr))]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_factorise(cfg: RunConfig) -> int:
    law = load_walk(cfg.input)
    fac = spectral_factorise(law, cfg.killing)
    res = verify_factorisation(law, fac.ascending, fac.descending, cfg.killing, cfg.grid).residual_max
    if not res < cfg.tol:
        raise FactorisationError(f"identity residual {res:.3e} exceeds tolerance {cfg.tol:.1e}")
    split = fac.split
    _emit(cfg, {
        "command": "factorise",
        "walk": law.to_json()["pmf"],
        "killing": cfg.killing,
        "span": fac.span,
        "mean": law.mean,
        "ascending": fac.ascending.to_json(),
        "descending": fac.descending.to_json(),
        "residual": res,
        "roots": {
            "inside": _roots(split.inside),
            "outside": _roots(split.outside),
            "on_circle": _roots(split.on_circle),
        },
    })
    return EXIT_OK


def _lab_exit(lemmas: dict, rejection: bool) -> int:
    failed = [k for k, v in lemmas.items() if v.passed is False]
    for name in failed:
        log.warning("check failed: %s %s", name, lemmas[name].detail)
    if rejection and any(k in REJECTION_CHECKS for k in failed):
        return EXIT_REJECTED
    return EXIT_LEMMA if failed else EXIT_OK


def _table(lemmas: dict) -> str:
    lines = [f"{'check':<12} {'result':<6} value"]
    for name, o in lemmas.items():
        flag = {True: "pass", False: "FAIL", None: "n/a"}[o.passed]
        value = "" if o.value is None else f"{o.value:.3e}"
        lines.append(f"{name:<12} {flag:<6} {value}")
    return "\n".join(lines)


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.factors is None:
        raise InputError("verify needs --factors")
    law = load_walk(cfg.input)
    candidate = load_factors(cfg.factors)
    report, _ = run_lab(law, cfg.killing, candidate, cfg.grid, cfg.trunc, cfg.tol)
    payload = {"command": "verify", "walk": law.to_json()["pmf"], **report.to_json()}
    code = _lab_exit(report.lemmas, rejection=True)
    payload["exit_code"] = code
    _emit(cfg, payload)
    print(_table(report.lemmas), file=sys.stderr)
    return code


def cmd_simulate(cfg: RunConfig) -> int:
    law = load_walk(cfg.input)
    log.info("simulate: seed=%d n=%d kind=%s r=%g", cfg.seed, cfg.samples, cfg.kind, cfg.killing)
    samples = simulate_ladder_samples(law, cfg.kind, cfg.killing, cfg.samples, cfg.seed, cfg.t_max)
    emp = samples.to_empirical()
    fac = spectral_factorise(law, cfg.killing)
    exact = fac.ascending if cfg.kind == "strict" else fac.descending
    cmp = compare_laws(emp, exact)
    payload = emp.to_json()
    payload.update({
        "command": "simulate",
        "walk": law.to_json()["pmf"],
        "t_max": cfg.t_max,
        "censored_fraction": emp.censored_fraction,
        "comparison": {
            "exact": exact.to_json(),
            "pass": cmp.passed,
            "z_scores": cmp.z_scores,
            "chi2": cmp.chi2,
            "threshold": cmp.threshold if np.isfinite(cmp.threshold) else None,
            "offending": cmp.offending,
        },
    })
    _emit(cfg, payload)
    return EXIT_OK


def cmd_lemma_checks(cfg: RunConfig) -> int:
    law = load_walk(cfg.input)
    candidate = load_factors(cfg.factors) if cfg.factors is not None else None
    report, table = run_lab(law, cfg.killing, candidate, cfg.grid, cfg.trunc, cfg.tol)
    code = _lab_exit(report.lemmas, rejection=False)
    csv_path = cfg.csv
    if csv_path is None and cfg.out is not None:
        csv_path = Path(cfg.out).with_suffix(".csv")
    if csv_path is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "u", "h", "v"])
        for row in zip(table["k"], table["u"], table["h"], table["v"]):
            writer.writerow([int(row[0])] + [repr(float(x)) for x in row[1:]])
        write_atomic(csv_path, buf.getvalue())
    payload = {"command": "lemma-checks", "walk": law.to_json()["pmf"], **report.to_json()}
    payload["exit_code"] = code
    _emit(cfg, payload)
    print(_table(report.lemmas), file=sys.stderr)
    return code


COMMANDS = {
    "factorise": cmd_factorise,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "lemma-checks": cmd_lemma_checks,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="whlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("input", type=Path, help="walk JSON: {\"pmf\": {\"-1\": 0.5, \"1\": 0.5}}")
        p.add_argument("--killing", type=float, default=1.0, help="killing parameter r in (0, 1]")
        p.add_argument("--grid", type=int, default=1024, help="z-grid size, power of two")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trunc", type=int, default=10_000, help="renewal truncation K")
        p.add_argument("--tol", type=float, default=1e-9, help="identity residual tolerance")
        p.add_argument("--out", type=Path)
        p.add_argument("--factors", type=Path, help="JSON with 'ascending' and 'descending' laws")
        if name == "simulate":
            p.add_argument("--kind", choices=["strict", "weak"], default="strict")
            p.add_argument("--samples", type=int, default=100_000)
            p.add_argument("--tmax", dest="t_max", type=int, default=10**6)
        if name == "lemma-checks":
            p.add_argument("--csv", type=Path, help="where to write the k,u,h,v table")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="whlab: %(message)s", stream=sys.stderr)
    args = vars(build_parser().parse_args(argv))
    cfg = RunConfig(**{k: v for k, v in args.items() if k in RunConfig.__dataclass_fields__})
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except FactorisationError as exc:
        log.error("factorisation error: %s", exc)
        return EXIT_FACTORISATION
    except (InputError, WHLabError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
