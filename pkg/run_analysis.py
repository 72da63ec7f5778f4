# run_analysis.py
from src.analyzer import FamilyAnalyzer
from src.config import load_config
from src.search import SearchConfig, SearchTarget, violation_search
from src.utils import setup_logging


def main():
    config = load_config()
    setup_logging(config['logging']['level'], config['logging']['file'])

    # Initialize analyzer
    analyzer = FamilyAnalyzer(tolerance=config['tolerances']['verdict'],
                              cap=config['enumeration']['subset_cap'])

    print("Sweeping theorem-backed checks...")
    shapes = [(d, d) for d in range(3, 7)]
    detail, summary = analyzer.theorem_sweep(shapes, config['sweep']['families'], config['sweep']['seed'])
    print(summary.to_string(index=False))
    print(f"Theorem-backed violations: {len(analyzer.violations(detail))}")

    # Search for negative-p counterexamples
    print("\nSearching for violations...")
    search_config = SearchConfig.from_dict(config['search'])
    for item in config['search']['targets']:
        result = violation_search(search_config, SearchTarget.from_dict(item))
        print(f"{result.target}: best margin {result.best_margin:.6g}")
        if result.witness is not None:
            print(result.witness.vectors)


if __name__ == "__main__":
    main()
