"""Batch command-line front end.

    opalg <command> FILE [FILE] [--tol T] [--seed S] [--out PATH]
          [--format json|text] [--timing]

Every run prints one report with the keys ``command``, ``inputs``,
``results``, ``residuals``, ``tolerances`` and ``elapsed_ms`` (``null``
unless ``--timing`` is given, so that reports are reproducible byte for
byte).  Exit status is 0 on success, 1 when a mathematical precondition
fails and 2 on malformed input.
"""

import argparse
import json
import math
import sys
import time

import numpy as np

from . import elemcalc, gelfand, gnsrep, linops, specanalysis, staralg, unbounded, vonneumann
from .errors import DomainError, InvalidInput, InvalidShape, MalformedJson, OpAlgError, UnknownCommand

SIG_DIGITS = 12


# serialisation ------------------------------------------------------------

def _round(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        r = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if r == 0 else r
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def vec_out(v):
    return [cplx(z) for z in np.asarray(v).ravel()]


def mat_out(m):
    m = np.asarray(m, dtype=complex)
    return {"rows": m.shape[0], "cols": m.shape[1], "data": vec_out(m)}


# parsing -------------------------------------------------------------------

def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}", path=path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(
            f"{path}: {exc.msg}", path=path, line=exc.lineno, column=exc.colno, position=exc.pos
        ) from None


def _complex(entry, where):
    if isinstance(entry, bool):
        raise InvalidInput(f"{where}: expected a number", where=where)
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, list) and len(entry) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry
    ):
        return complex(entry[0], entry[1])
    raise InvalidInput(f"{where}: expected [re, im]", where=where)


def parse_vector(data, where="vector"):
    if not isinstance(data, list):
        raise InvalidInput(f"{where}: expected a list", where=where)
    return np.array([_complex(e, f"{where}[{i}]") for i, e in enumerate(data)], dtype=complex)


def parse_matrix(obj, where="matrix"):
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise InvalidInput(f"{where}: expected rows, cols and data", where=where)
    r, c = obj["rows"], obj["cols"]
    if not isinstance(r, int) or not isinstance(c, int) or r < 1 or c < 1:
        raise InvalidShape(f"{where}: rows and cols must be positive integers", where=where)
    data = parse_vector(obj["data"], f"{where}.data")
    if data.size != r * c:
        raise InvalidShape(f"{where}: expected {r * c} entries, got {data.size}", where=where)
    return data.reshape(r, c)


def parse_algebra(obj, where="algebra"):
    if not isinstance(obj, dict) or not {"basis", "mult", "star"} <= obj.keys():
        raise InvalidInput(f"{where}: expected basis, mult and star", where=where)
    names = obj["basis"]
    if not isinstance(names, list) or not names:
        raise InvalidInput(f"{where}.basis: expected a non-empty list", where=where)
    d = len(names)
    mult = np.zeros((d, d, d), dtype=complex)
    for t, row in enumerate(obj["mult"]):
        if not isinstance(row, list) or len(row) != 5:
            raise InvalidInput(f"{where}.mult[{t}]: expected [i, j, k, re, im]", where=where)
        i, j, k = row[:3]
        if not all(isinstance(v, int) and 0 <= v < d for v in (i, j, k)):
            raise InvalidInput(f"{where}.mult[{t}]: index out of range", where=where)
        mult[i, j, k] += _complex(row[3:], f"{where}.mult[{t}]")
    star = parse_matrix(obj["star"], f"{where}.star")
    real = obj.get("realization")
    if real is not None:
        real = np.array([parse_matrix(m, f"{where}.realization[{i}]") for i, m in enumerate(real)])
    unit = obj.get("unit")
    if unit is not None and not (isinstance(unit, int) and 0 <= unit < d):
        raise InvalidInput(f"{where}.unit: expected a basis index", where=where)
    return staralg.build_algebra(
        names, mult, star, norm_tag=obj.get("norm", "ell1"), unit=unit, realization=real
    )


def parse_operator_set(obj):
    if isinstance(obj, dict) and "matrices" in obj:
        mats = [parse_matrix(m, f"matrices[{i}]") for i, m in enumerate(obj["matrices"])]
        star_closed = bool(obj.get("star_closed", True))
    else:
        mats, star_closed = [parse_matrix(obj)], True
    S = vonneumann.as_operator_set(mats)
    return vonneumann.OperatorSet(S.carrier_dim, S.mats, star_closed), mats


def parse_l1z(obj):
    if not isinstance(obj, dict) or not {"offset", "coeffs", "K"} <= obj.keys():
        raise InvalidInput("l1z: expected offset, coeffs and K")
    if not isinstance(obj["offset"], int) or not isinstance(obj["K"], int) or obj["K"] < 0:
        raise InvalidInput("l1z: offset and K must be integers, K >= 0")
    N = obj.get("N")
    if N is not None and (not isinstance(N, int) or N < 1):
        raise InvalidInput("l1z: N must be a positive integer")
    return gelfand.L1ZElement(obj["offset"], parse_vector(obj["coeffs"], "coeffs")), obj["K"], N


def parse_diagonal(obj):
    try:
        return _parse_diagonal(obj)
    except (TypeError, ValueError, AttributeError) as exc:
        raise InvalidInput(f"operator: {exc}") from None


def _parse_diagonal(obj):
    if not isinstance(obj, dict) or "symbol" not in obj or "vector" not in obj:
        raise InvalidInput("operator: expected symbol and vector")
    sym = obj["symbol"]
    kind = sym.get("kind") if isinstance(sym, dict) else None
    if kind == "power":
        symbol = unbounded.PowerSymbol(t=float(sym.get("t", 1.0)), c=float(sym.get("c", 1.0)))
    elif kind == "affine":
        symbol = unbounded.AffineSymbol(float(sym.get("slope", 1.0)), float(sym.get("shift", 0.0)))
    elif kind == "table":
        symbol = unbounded.TableSymbol(tuple(sym.get("values", ())))
    else:
        raise InvalidInput("symbol.kind must be power, affine or table")
    weights = unbounded.PowerWeights(float(obj.get("weights", {}).get("r", 0.0)))
    N = int(obj.get("truncation", unbounded.DEFAULT_TRUNCATION))
    a = unbounded.DiagonalOperator(symbol, weights, N)
    x = unbounded.SeqVector(entries=parse_vector(obj["vector"]))
    t = float(obj.get("t", 0.0))
    hs = [float(h) for h in obj.get("h", [1e-2, 1e-3, 1e-4])]
    return a, x, t, hs


def _element_or_matrix(paths):
    """A matrix file, or an algebra file followed by an element file."""
    first = load_json(paths[0])
    if isinstance(first, dict) and "basis" in first:
        if len(paths) < 2:
            raise InvalidInput("algebra input needs an element file")
        A = parse_algebra(first)
        el = load_json(paths[1])
        x = parse_vector(el.get("coeffs") if isinstance(el, dict) else el, "coeffs")
        if x.size != A.dim:
            raise InvalidShape("element length does not match algebra dimension", expected=A.dim, got=int(x.size))
        return (A, x), {"algebra": first, "element": el}
    return linops.as_cmat(parse_matrix(first), square=True), {"matrix": first}


# commands ------------------------------------------------------------------

def cmd_spectrum(paths, opts):
    a, inputs = _element_or_matrix(paths)
    opts.inputs = inputs
    tol = opts.tol
    sr = specanalysis.spectral_radius(a, tol=tol)
    if isinstance(a, tuple):
        A, x = a
        values = staralg.spectrum(A, x, tol)
        results = {"spectrum": vec_out(values)}
        residuals = {}
    else:
        dec = linops.eig(a, tol)
        order = linops.sort_key_order(dec.values, max(1.0, linops.op_norm(a)))
        vals = dec.values[order]
        herm = linops.is_hermitian(a, tol)
        results = {
            "eigenvalues": [float(v.real) for v in vals] if herm else vec_out(vals),
            "normal": bool(dec.normal),
            "hermitian": bool(herm),
        }
        residuals = {"eigen": dec.residual}
    results["spectral_radius"] = sr.value
    results["spectral_radius_eig"] = sr.eig_max
    residuals["spectral_radius_gap"] = sr.gap
    return inputs, results, residuals


def cmd_positivity(paths, opts):
    a, inputs = _element_or_matrix(paths)
    opts.inputs = inputs
    positive = specanalysis.positive_test(a, opts.tol)
    results = {"positive": positive}
    if not isinstance(a, tuple):
        h = linops.hermitian_part(a)
        results["hermitian"] = linops.is_hermitian(a, opts.tol)
        results["min_eigenvalue"] = float(np.linalg.eigvalsh(h).min())
    return inputs, results, {}


def cmd_sqrt(paths, opts):
    a, inputs = _element_or_matrix(paths)
    opts.inputs = inputs
    if isinstance(a, tuple):
        raise InvalidInput("sqrt works on matrix input")
    r = elemcalc.positive_sqrt(a, opts.tol)
    results = {"sqrt": mat_out(r)}
    residuals = {"square": linops.op_norm(r @ r - a)}
    n = a.shape[0]
    shifted = a - np.eye(n)
    if specanalysis.spectral_radius(shifted, tol=opts.tol).eig_max < 1 - opts.tol:
        s = elemcalc.sqrt_series(shifted, tol=opts.tol)
        results["series_terms"] = s.terms
        residuals["series_vs_eigen"] = linops.op_norm(np.eye(n) + s.b - r)
        residuals["series_tail_bound"] = s.tail_bound
    return inputs, results, residuals


def cmd_polar(paths, opts):
    a, inputs = _element_or_matrix(paths)
    opts.inputs = inputs
    if isinstance(a, tuple):
        raise InvalidInput("polar works on matrix input")
    u, p = elemcalc.polar_factorise(a, opts.tol)
    n = a.shape[0]
    return inputs, {"u": mat_out(u), "abs": mat_out(p)}, {
        "factorisation": linops.op_norm(u @ p - a),
        "unitarity": linops.op_norm(u.conj().T @ u - np.eye(n)),
    }


def cmd_gelfand(paths, opts):
    obj = load_json(paths[0])
    opts.inputs = inputs = {"algebra": obj}
    A = parse_algebra(obj)
    table = gelfand.characters(A, seed=gelfand.CHARACTER_SEED + opts.seed)
    results = {
        "count": len(table),
        "characters": [vec_out(row) for row in table.characters],
    }
    if len(paths) > 1:
        el = load_json(paths[1])
        inputs["element"] = el
        x = parse_vector(el.get("coeffs") if isinstance(el, dict) else el, "coeffs")
        results["transform"] = vec_out(gelfand.gelfand_transform(A, x, table))
    return inputs, results, {"multiplicativity": table.multiplicativity_residual}


def cmd_gns(paths, opts):
    if len(paths) < 2:
        raise InvalidInput("gns needs an algebra file and a functional file")
    obj, fobj = load_json(paths[0]), load_json(paths[1])
    opts.inputs = {"algebra": obj, "functional": fobj}
    A = parse_algebra(obj)
    if not isinstance(fobj, dict) or "values" not in fobj:
        raise InvalidInput("functional: expected values")
    phi = gnsrep.Functional(A, parse_vector(fobj["values"], "values"))
    g = gnsrep.gns_construct(A, phi, opts.tol)
    diag = gnsrep.functional_diagnostics(A, phi, opts.tol)
    c = g.cyclic
    repro = max(abs(phi(A.basis(i)) - np.vdot(c, g.rep.mats[i] @ c)) for i in range(A.dim))
    comm = vonneumann.commutant(vonneumann.OperatorSet(g.quotient_dim, g.rep.mats, True))
    return {"algebra": obj, "functional": fobj}, {
        "quotient_dim": g.quotient_dim,
        "variation": diag.variation,
        "cyclic_vector": vec_out(c),
        "commutant_dim": len(comm),
        "representation": [mat_out(m) for m in g.rep.mats],
    }, {
        "reproduction": float(repro),
        "representation": gnsrep.representation_defect(g.rep),
    }


def cmd_commutant(paths, opts):
    obj = load_json(paths[0])
    opts.inputs = {"set": obj}
    S, mats = parse_operator_set(obj)
    C = vonneumann.commutant(S, opts.tol)
    gens = vonneumann._with_adjoints(S)
    resid = max((linops.op_norm(a @ X - X @ a) for a in gens for X in C.mats), default=0.0)
    return {"set": obj}, {
        "dimension": len(C),
        "basis": [mat_out(m) for m in C.mats],
        "commutative": vonneumann.commutes_pairwise(C.mats) is None,
    }, {"commutation": resid}


def cmd_diagonalize(paths, opts):
    if len(paths) < 2:
        raise InvalidInput("diagonalize needs an operator-set file and a vector file")
    obj, vobj = load_json(paths[0]), load_json(paths[1])
    opts.inputs = {"set": obj, "vector": vobj}
    _, mats = parse_operator_set(obj)
    c = parse_vector(vobj.get("vector") if isinstance(vobj, dict) else vobj)
    r = vonneumann.diagonalise_cyclic(mats, c, tol=max(opts.tol, 1e-9), seed=vonneumann.DIAGONALISE_SEED + opts.seed)
    U = r.unitary
    return {"set": obj, "vector": vobj}, {
        "weights": [float(w) for w in r.weights],
        "unitary": mat_out(U),
        "characters": [vec_out(row) for row in r.characters.characters],
    }, {
        "intertwining": r.intertwining_residual,
        "unitarity": linops.op_norm(U.conj().T @ U - np.eye(U.shape[1])),
    }


def cmd_evolve(paths, opts):
    obj = load_json(paths[0])
    opts.inputs = {"operator": obj}
    a, x, t, hs = parse_diagonal(obj)
    y = unbounded.evolve(a, t, x)
    checks = [unbounded.generator_check(a, x, h) for h in hs]
    res = [g.residual for g in checks]
    slope = unbounded.loglog_slope(hs, res) if len(hs) > 1 and min(res) > 0 else None
    return {"operator": obj}, {
        "vector": vec_out(y.values(max(x.support_size, 1))),
        "generator_constants": [g.constant for g in checks],
        "generator_slope": slope,
    }, {
        "norm": abs(unbounded.norm(a, y) - unbounded.norm(a, x)),
        "group_law": unbounded.group_law_residual(a, t, t, x),
        "generator": res,
    }


def cmd_wiener(paths, opts):
    obj = load_json(paths[0])
    opts.inputs = {"l1z": obj}
    a, K, N = parse_l1z(obj)
    w = gelfand.wiener_invert(a, K, N, tol=opts.tol)
    return {"l1z": obj}, {
        "offset": w.b.offset,
        "coeffs": vec_out(w.b.coeffs),
        "tail": w.tail,
        "tail_ok": w.tail_ok,
        "min_symbol": w.min_symbol,
    }, {"convolution": w.residual}


COMMANDS = {
    "spectrum": (cmd_spectrum, 1, 2),
    "positivity": (cmd_positivity, 1, 2),
    "sqrt": (cmd_sqrt, 1, 2),
    "polar": (cmd_polar, 1, 2),
    "gelfand": (cmd_gelfand, 1, 2),
    "gns": (cmd_gns, 2, 2),
    "commutant": (cmd_commutant, 1, 1),
    "diagonalize": (cmd_diagonalize, 2, 2),
    "evolve": (cmd_evolve, 1, 1),
    "wiener": (cmd_wiener, 1, 1),
}


# dispatch ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(message)


def _options(command, rest):
    p = _Parser(prog=f"opalg {command}", add_help=False)
    p.add_argument("files", nargs="*")
    p.add_argument("--tol", type=float, default=linops.DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--timing", action="store_true")
    return p.parse_args(rest)


def _text(report, prefix=""):
    lines = []
    for k in sorted(report):
        v = report[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict) and v and not {"rows", "cols", "data"} <= v.keys():
            lines.extend(_text(v, key + "."))
        else:
            lines.append(f"{key}: {json.dumps(v, sort_keys=True)}")
    return lines


def render(report, fmt="json"):
    if fmt == "text":
        return "\n".join(_text(report)) + "\n"
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def run(argv):
    """Return ``(exit_code, report, options)`` without printing."""
    command = argv[0] if argv else None
    report = {"command": command, "inputs": None, "results": None, "residuals": None,
              "tolerances": None, "elapsed_ms": None}
    opts = None
    start = time.perf_counter()
    try:
        if command not in COMMANDS:
            raise UnknownCommand(f"unknown command {command!r}", command=command, known=sorted(COMMANDS))
        fn, lo, hi = COMMANDS[command]
        opts = _options(command, argv[1:])
        report["tolerances"] = {"tol": opts.tol, "seed": opts.seed}
        if not lo <= len(opts.files) <= hi:
            raise InvalidInput(f"{command} expects {lo}..{hi} input files, got {len(opts.files)}")
        with np.errstate(all="ignore"):
            inputs, results, residuals = fn(opts.files, opts)
        report["inputs"] = inputs
        report["results"] = _round(results)
        report["residuals"] = _round(residuals)
        code = 0
    except OpAlgError as exc:
        report["inputs"] = getattr(opts, "inputs", None)
        report["error"] = _round(exc.to_dict())
        code = 1 if isinstance(exc, DomainError) else 2
    if opts is not None and opts.timing:
        report["elapsed_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
    return code, report, opts


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    code, report, opts = run(argv)
    text = render(report, opts.format if opts else "json")
    if opts is not None and opts.out:
        with open(opts.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
