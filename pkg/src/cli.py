"""
Command-line interface.

    vector-maclaurin check FAMILY --p 1
    vector-maclaurin zonotope FAMILY --direction 0,0,1
    vector-maclaurin search --config config/config.yaml --witness witness.yaml
    vector-maclaurin reduce FAMILY --k 3
    vector-maclaurin chain 1 2 3
    vector-maclaurin sweep --families 200

Exit status: 0 when every checked inequality holds, 1 when one is violated,
2 on input or domain errors. The seed is taken from --seed, then the
VECTOR_MACLAURIN_SEED environment variable, then the config file.
"""

import argparse
import logging
import sys
import time
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .analyzer import FamilyAnalyzer
from .config import load_config, resolve_seed
from .exceptions import InfeasibleInterval, VectorMaclaurinError
from .family_io import family_document, parse_family_text, read_family, write_family
from .inequalities import (
    HOLDS, VIOLATED, check_classical_maclaurin, check_reduction, check_vector_maclaurin,
    overall_verdict,
)
from .linalg import VectorFamily
from .reporting import EXIT_ERROR, RunReport, search_result_document
from .search import SearchConfig, SearchTarget, monotone_orthogonalize, violation_search
from .symmetric_sums import PowerExponent
from .utils import digest_rows, setup_logging
from .zonotope import (
    Zonotope, check_mcmullen_zonotope, check_projection_inequality, intrinsic_volumes,
    projected_intrinsic_volume,
)

logger = logging.getLogger(__name__)


def _load_family(path: str) -> VectorFamily:
    if path == '-':
        return parse_family_text(sys.stdin.read())
    return read_family(path)


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(cell) for cell in text.replace(';', ',').split(',') if cell.strip()])
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"cannot parse vector '{text}'") from e


def _parse_shape(text: str) -> tuple:
    try:
        m, d = (int(part) for part in text.lower().replace('x', ',').split(','))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"shape must look like 'm,d', got '{text}'") from e
    return m, d


def _tolerances(args, config: Dict[str, Any]) -> Dict[str, float]:
    tolerances = dict(config['tolerances'])
    if args.tol is not None:
        tolerances['verdict'] = args.tol
    return tolerances


def _cap(args, config: Dict[str, Any]) -> int:
    return int(args.cap if args.cap is not None else config['enumeration']['subset_cap'])


def _threads(args, config: Dict[str, Any]) -> int:
    return int(args.threads if args.threads is not None else config['performance']['threads'])


def cli_check(args, config: Dict[str, Any]) -> RunReport:
    """Maclaurin chain of a family file under one exponent."""
    family = _load_family(args.family)
    tolerances = _tolerances(args, config)
    p = PowerExponent.parse(args.p, allow_negative=True)
    report = check_vector_maclaurin(family, p, k_max=args.k_max, tolerance=tolerances['verdict'],
                                    cap=_cap(args, config), threads=_threads(args, config))
    return RunReport(command=[], input_digest=digest_rows(family.vectors),
                     results={'maclaurin': report.to_dict(), 'family': {'m': family.count, 'd': family.dim}},
                     tolerances=tolerances, verdict=report.verdict)


def cli_zonotope(args, config: Dict[str, Any]) -> RunReport:
    """Intrinsic volumes of the zonotope generated by a family, plus projection and log-concavity checks."""
    family = _load_family(args.family)
    tolerances = _tolerances(args, config)
    tol, cap = tolerances['verdict'], _cap(args, config)
    zonotope = Zonotope(family)
    volumes = intrinsic_volumes(zonotope, args.k_max, cap=cap, threads=_threads(args, config))
    results: Dict[str, Any] = {'intrinsic_volumes': list(volumes.values)}

    verdicts = []
    mcmullen = []
    for j in range(1, zonotope.dim):
        if zonotope.count <= j:
            break
        outcome = check_mcmullen_zonotope(zonotope, j, tol, cap)
        mcmullen.append({'j': j, 'strong': outcome.strong.to_dict(), 'weak': outcome.weak.to_dict()})
        verdicts.append(outcome.weak.verdict)
    results['mcmullen'] = mcmullen

    if args.direction is not None:
        u = args.direction / np.linalg.norm(args.direction)
        results['direction'] = u
        results['projected_intrinsic_volumes'] = [projected_intrinsic_volume(zonotope, u, k, cap)
                                                  for k in range(zonotope.dim)]
        projection = []
        for k in range(2, zonotope.dim + 1):
            sharp = check_projection_inequality(zonotope, u, k, sharp=True, tolerance=tol, cap=cap)
            entry = {'k': k, 'sharp': sharp.to_dict()}
            if k >= 3:
                constant = check_projection_inequality(zonotope, u, k, sharp=False, tolerance=tol, cap=cap)
                entry['constant'] = constant.to_dict()
                verdicts.append(constant.verdict)
            projection.append(entry)
        results['projection'] = projection

    return RunReport(command=[], input_digest=digest_rows(family.vectors), results=results,
                     tolerances=tolerances, verdict=overall_verdict(verdicts) if verdicts else HOLDS)


def cli_search(args, config: Dict[str, Any]) -> RunReport:
    """Violation search over every target of the config's search section."""
    section = config['search']
    seed = resolve_seed(args.seed, config)
    if args.restarts is not None:
        section = dict(section, restarts=args.restarts)
    search_config = SearchConfig.from_dict(section, seed=seed, threads=_threads(args, config))
    targets = [SearchTarget.from_dict(item) for item in section['targets']]

    documents = []
    best = None
    for target in targets:
        result = violation_search(search_config, target)
        documents.append(search_result_document(result))
        if result.witness is not None and (best is None or result.best_margin < best.best_margin):
            best = result
    if args.witness and best is not None:
        write_family(best.witness, args.witness)
        logger.info("Witness for %s written to %s", best.target, args.witness)

    tolerance = _tolerances(args, config)['verdict']
    violated = any(doc['best_margin'] < -tolerance for doc in documents)
    return RunReport(command=[], results={'config': search_config.to_dict(), 'searches': documents},
                     tolerances=_tolerances(args, config), seed=seed,
                     verdict=VIOLATED if violated else HOLDS)


def cli_reduce(args, config: Dict[str, Any]) -> RunReport:
    """Reduction ratios for every pivot and the monotone orthogonalization of a family."""
    family = _load_family(args.family)
    tolerances = _tolerances(args, config)
    k = args.k
    pairs = [check_reduction(family, k, pivot, tolerances['verdict']).to_dict() for pivot in range(family.dim)]
    results: Dict[str, Any] = {'k': k, 'ratios': pairs}
    p_one = PowerExponent.finite(1.0)
    before = check_vector_maclaurin(family, p_one, k_max=k)
    results['means_before'] = before.means[k - 2:k]
    try:
        orthogonal = monotone_orthogonalize(family, k, tolerances['sandwich'], tolerances['chain'])
    except InfeasibleInterval as e:
        results['infeasible'] = {'step': e.step, 'lo': e.lo, 'hi': e.hi}
        return RunReport(command=[], input_digest=digest_rows(family.vectors), results=results,
                         tolerances=tolerances, verdict=VIOLATED)

    after = check_vector_maclaurin(orthogonal, p_one, k_max=k)
    norms_chain = check_classical_maclaurin(orthogonal.norms(), tolerances['verdict'])
    results.update({
        'orthogonalized': family_document(orthogonal),
        'means_after': after.means[k - 2:k],
        'norm_chain': norms_chain.to_dict(),
    })
    if args.witness:
        write_family(orthogonal, args.witness)
    return RunReport(command=[], input_digest=digest_rows(family.vectors), results=results,
                     tolerances=tolerances, verdict=norms_chain.verdict)


def cli_chain(args, config: Dict[str, Any]) -> RunReport:
    """Classical Maclaurin chain of positive numbers."""
    tolerances = _tolerances(args, config)
    report = check_classical_maclaurin(args.numbers, tolerances['verdict'])
    return RunReport(command=[], results={'maclaurin': report.to_dict()}, tolerances=tolerances,
                     verdict=report.verdict)


def cli_sweep(args, config: Dict[str, Any]) -> RunReport:
    """Theorem-backed checks on seeded random families."""
    tolerances = _tolerances(args, config)
    seed = resolve_seed(args.seed, config, section='sweep')
    families = args.families if args.families is not None else int(config['sweep']['families'])
    shapes = args.shape or [(d, d) for d in range(3, 7)]
    analyzer = FamilyAnalyzer(tolerances['verdict'], _cap(args, config), _threads(args, config))
    detail, summary = analyzer.theorem_sweep(shapes, families, seed)
    violations = analyzer.violations(detail)
    if not violations.empty:
        logger.error("%d theorem-backed checks violated", len(violations))
    return RunReport(command=[], results={'summary': summary, 'violations': violations,
                                          'shapes': [list(shape) for shape in shapes], 'families': families},
                     tolerances=tolerances, seed=seed,
                     verdict=VIOLATED if not violations.empty else HOLDS)


COMMANDS = {
    'check': cli_check,
    'zonotope': cli_zonotope,
    'search': cli_search,
    'reduce': cli_reduce,
    'chain': cli_chain,
    'sweep': cli_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="YAML config file (default config/config.yaml)")
    common.add_argument('--log-level', help="logging level, overrides the config")
    common.add_argument('--out', help="write the report here instead of standard output")
    common.add_argument('--tol', type=float, help="verdict tolerance")
    common.add_argument('--cap', type=int, help="maximum number of subsets to enumerate")
    common.add_argument('--threads', type=int, help="worker threads")

    parser = argparse.ArgumentParser(prog='vector-maclaurin',
                                     description="Verify vector-valued Maclaurin inequalities")
    sub = parser.add_subparsers(dest='command', required=True)

    check = sub.add_parser('check', parents=[common], help="Maclaurin chain of a family")
    check.add_argument('family', help="family file, '-' for standard input")
    check.add_argument('--p', default='1', help="exponent: 0, inf or a decimal (negatives probe)")
    check.add_argument('--k-max', '--k', dest='k_max', type=int, help="last k of the chain (default d)")

    zono = sub.add_parser('zonotope', parents=[common], help="intrinsic volumes of the generated zonotope")
    zono.add_argument('family', help="generator file, '-' for standard input")
    zono.add_argument('--k-max', dest='k_max', type=int, help="last intrinsic volume (default d)")
    zono.add_argument('--direction', type=_parse_vector, help="projection direction, e.g. 0,0,1")

    search = sub.add_parser('search', parents=[common], help="randomized violation search")
    search.add_argument('--seed', type=int, help="root seed")
    search.add_argument('--restarts', type=int, help="override restarts per shape")
    search.add_argument('--witness', help="write the best witness family here")

    reduce_ = sub.add_parser('reduce', parents=[common], help="reduction ratios and orthogonalization")
    reduce_.add_argument('family', help="family of d vectors in R^d, '-' for standard input")
    reduce_.add_argument('--k', type=int, required=True, help="2 <= k <= d")
    reduce_.add_argument('--witness', help="write the orthogonalized family here")

    chain = sub.add_parser('chain', parents=[common], help="classical Maclaurin chain of numbers")
    chain.add_argument('numbers', nargs='+', type=float, help="positive numbers")

    sweep = sub.add_parser('sweep', parents=[common], help="theorem-backed checks on random families")
    sweep.add_argument('--families', type=int, help="families per shape")
    sweep.add_argument('--seed', type=int, help="root seed")
    sweep.add_argument('--shape', type=_parse_shape, action='append', help="m,d shape; repeatable")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
    except (OSError, ValueError) as e:
        setup_logging('ERROR')
        logger.error("Cannot load config: %s", e)
        return EXIT_ERROR
    setup_logging(args.log_level or config['logging']['level'], config['logging']['file'])

    logger.info("Running %s", args.command)
    started = time.perf_counter()
    try:
        report = COMMANDS[args.command](args, config)
    except (VectorMaclaurinError, ValueError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

    report.command = ['vector-maclaurin'] + argv
    report.wall_time = time.perf_counter() - started
    if args.out:
        report.write(args.out)
    else:
        report.dump(sys.stdout)
    logger.info("%s finished with verdict %s in %.3fs", args.command, report.verdict, report.wall_time)
    return report.exit_status


if __name__ == '__main__':
    sys.exit(main())
