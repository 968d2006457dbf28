"""Main CLI interface for Relatron."""

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__, process

process.setup(source=__name__)

from .errors import RelatronError  # noqa: E402
from .logs.listener import QueueListener  # noqa: E402
from .settings import ConfigManager, RelatronConfig  # noqa: E402
from .util.io import RunManifest, write_json  # noqa: E402
from .util.terminal import print_error, print_info, print_success, print_table, print_warning  # noqa: E402

logger: logging.Logger = logging.getLogger(__name__)


def parse_floats(value: str) -> list[float]:
    """Parse a comma-separated list of numbers.

    Raises:
        argparse.ArgumentTypeError: If an item is not a number.
    """
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid number list {value!r}") from e


def parse_ints(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid integer list {value!r}") from e


def load_config(args) -> RelatronConfig:
    """Config file and env settings with the global flags applied on top."""
    config = ConfigManager(args.config).load_config(seed=args.seed, threads=args.threads)
    if config.log_level:
        logging.getLogger("relatron").setLevel(config.log_level)
    return config


def finish(args, config: RelatronConfig, data, out: Path | None, inputs=()) -> None:
    """Write the primary output and its run manifest once pending log records are out."""
    QueueListener.flush_all()
    manifest = RunManifest(args.command_name, config.model_dump(mode="json"), config.seed, __version__)
    manifest.add_inputs(inputs)
    write_json(out, data)
    manifest.write(out)
    if out is not None and str(out) != "-":
        print_success(f"Wrote {out}")


def cmd_ingest(args) -> int:
    """Validate a schema and its tables."""
    from .rdb import augment_fk_pairs, build_graph, load_database, load_schema

    config = load_config(args)
    schema = load_schema(args.schema)
    db = load_database(schema, args.data or Path(args.schema).parent)
    graph = augment_fk_pairs(build_graph(db), db)

    diagnostics = db.diagnostics()
    print_table("Tables", ["table", "rows"], sorted(diagnostics["rows"].items()))
    for relation in diagnostics["relations"]:
        if relation["dangling"]:
            print_warning(f"{relation['relation']}: {relation['dangling']} dangling keys")

    data = {"database": diagnostics, "graph": graph.summary()}
    finish(args, config, data, args.out, [args.schema, args.data or args.schema.parent])
    return 0


def cmd_profile(args) -> int:
    """Profile a task into an embedding."""
    from .pipeline import load_inputs, profile_task
    from .sketch import load_external_affinity

    config = load_config(args)
    db, task = load_inputs(args.schema, args.task, args.data)
    external = load_external_affinity(args.external) if args.external else None

    run = profile_task(
        db, task, config, probes=args.probes, heuristics=args.heuristics, budget=args.budget, external=external
    )
    embedding = run.embedding
    print_table(
        f"Embedding of {task.name}",
        ["feature", "value"],
        [(n, None if math.isnan(v) else float(v)) for n, v in zip(embedding.names, embedding.values)],
    )
    if embedding.imputed:
        print_warning(f"Missing features: {', '.join(embedding.imputed)}")

    inputs = [args.schema, args.task, args.data or args.schema.parent, args.external]
    if args.report:
        finish(args, config, run.report(), args.report, inputs)
    finish(args, config, embedding.as_dict(), args.out, inputs)
    return 0


def cmd_homophily(args) -> int:
    """Homophily profile of a task, optionally with join verification and shuffle nulls."""
    from .homophily import label_shuffle_null, profile
    from .pipeline import load_inputs
    from .rdb import aggregate_labels, augment_fk_pairs, build_graph, enumerate_metapaths
    from .rdb.metapath import project_metapath, project_metapath_bruteforce

    config = load_config(args)
    db, task = load_inputs(args.schema, args.task, args.data)
    graph = augment_fk_pairs(build_graph(db), db)
    summary = aggregate_labels(task)
    multi_hop = args.multi_hop or config.multi_hop
    metapaths = enumerate_metapaths(graph, task.header.entity_table, multi_hop=multi_hop)

    result = profile(graph, task, summary, metapaths=metapaths, threads=config.threads)
    report = result.as_dict()

    if args.verify:
        verified = {}
        for metapath in metapaths:
            fast = project_metapath(graph, metapath)
            slow = project_metapath_bruteforce(graph, metapath)
            verified[metapath.name] = fast.as_set() == slow.as_set()
            if not verified[metapath.name]:
                print_error(f"Projection mismatch on {metapath.name}")
        report["verified"] = verified

    if args.shuffles:
        nulls = {}
        for metapath in metapaths:
            if metapath.name not in result.metapaths:
                continue
            try:
                null = label_shuffle_null(project_metapath(graph, metapath), summary, args.shuffles, config.seed)
            except RelatronError as e:
                print_warning(f"No shuffle null for {metapath.name}: {e}")
                continue
            nulls[metapath.name] = {
                "observed": null.observed,
                "mean": null.mean,
                "std": null.std,
                "z_score": null.z_score,
                "shuffles": null.shuffles,
            }
        report["shuffle_null"] = nulls

    print_table(
        f"Homophily of {task.name}",
        ["metapath", "edges", "h_edge", "h_adj", "h_ins", "h_agg"],
        [(name, m.n_edges, m.h_edge, m.h_adj, m.h_ins, m.h_agg) for name, m in result.metapaths.items()],
    )
    finish(args, config, report, args.out, [args.schema, args.task, args.data or args.schema.parent])
    return 0


def cmd_sketch(args) -> int:
    """Path sketch features for one node type and, given a task, affinity scores."""
    from .rdb import augment_fk_pairs, build_graph, load_database, load_schema, load_task
    from .sketch import SketchConfig, SketchGraph, affinity_scores, load_external_affinity, path_sketch, sources_of
    from .util.io import write_text

    config = load_config(args)
    schema = load_schema(args.schema)
    db = load_database(schema, args.data or Path(args.schema).parent)
    graph = augment_fk_pairs(build_graph(db), db)
    task = load_task(args.task, db) if args.task else None

    source_type = args.source_type or (task.header.entity_table if task else None)
    if source_type is None:
        print_error("Give --source-type or --task")
        return 1

    sketch_config = SketchConfig(
        width=args.width or config.sketch.width,
        horizon=args.horizon or config.sketch.horizon,
        mode=args.mode or config.sketch.mode,
        seed=config.seed,
    )
    sg = SketchGraph(graph)
    sources = sources_of(sg, source_type)
    features = path_sketch(sg, sketch_config, sources, threads=config.threads)
    ids = db.table(source_type).frame[db.schema.table(source_type).primary_key].tolist()

    inputs = [args.schema, args.data or args.schema.parent, args.task]
    manifest = RunManifest(args.command_name, config.model_dump(mode="json"), config.seed, __version__)
    manifest.add_inputs(inputs)
    QueueListener.flush_all()
    write_text(args.out, features.to_frame(ids).to_csv(index=False))
    manifest.write(args.out)
    print_success(f"Wrote {features.matrix.shape[0]} x {features.width} sketch to {args.out}")

    if task is not None and args.affinity_out:
        scores = affinity_scores(
            graph,
            task,
            db,
            width=sketch_config.width,
            seed=config.seed,
            lam=config.ridge_lambda,
            slots=config.category_slots,
            external=load_external_affinity(args.external) if args.external else None,
            threads=config.threads,
        )
        print_table("Affinity", ["probe", "score"], sorted(scores.scores.items()))
        finish(args, config, scores.as_dict(), args.affinity_out, [*inputs, args.external])
    return 0


def cmd_landscape(args) -> int:
    """Landscape metrics per surface and, with validation scores, the post-selection verdict."""
    from .landscape import Candidate, landscape_metrics, load_surface, post_select

    config = load_config(args)
    surfaces = [load_surface(path) for path in args.surfaces]
    metrics = [landscape_metrics(grid, interpolate=args.interpolate) for grid in surfaces]

    print_table(
        "Landscape",
        ["surface", "P1", "P2", "Pbar"],
        [(str(path), m.p1, m.p2, m.pbar) for path, m in zip(args.surfaces, metrics)],
    )
    report = {"surfaces": {str(path): m.as_dict() for path, m in zip(args.surfaces, metrics)}}

    if args.val:
        if len(args.val) != len(surfaces):
            print_error(f"{len(args.val)} validation scores for {len(surfaces)} surfaces")
            return 1
        candidates = [
            Candidate(str(path), score, args.higher_is_better, m, grid.family)
            for path, score, m, grid in zip(args.surfaces, args.val, metrics, surfaces)
        ]
        chosen = post_select(candidates)
        report["selected"] = chosen
        print_info(f"Selected {chosen}")

    finish(args, config, report, args.out, args.surfaces)
    return 0


def cmd_bank(args) -> int:
    """Performance bank actions."""
    from .bank import append_records, graphgym_similarity, load_bank, winners

    config = load_config(args)

    if args.bank_action == "add":
        records = []
        for source in args.records:
            text = Path(source).read_text(encoding="utf-8") if source != "-" else sys.stdin.read()
            records.extend(json.loads(line) for line in text.splitlines() if line.strip())
        if args.record:
            records.append(json.loads(args.record))
        count = append_records(args.bank, records)
        print_success(f"Appended {count} records to {args.bank}")
        return 0

    bank = load_bank(args.bank)

    if args.bank_action == "winners":
        found, skipped = winners(bank, args.by, budget=args.budget)
        print_table(
            f"Winners by {args.by}",
            ["task", "family", "margin", "gap"],
            [(task, w.family, w.margin, w.gap) for task, w in sorted(found.items())],
        )
        for task, reason in skipped.items():
            print_warning(f"{task}: {reason}")
        data = {
            "by": args.by,
            "budget": args.budget,
            "winners": {t: w.as_dict() for t, w in found.items()},
            "skipped": skipped,
        }
        finish(args, config, data, args.out, [args.bank])
        return 0

    similarity = graphgym_similarity(
        bank, exclusions=config.seed_exclusions, min_shared=args.min_shared, threads=config.threads
    )
    finish(args, config, similarity.as_dict(), args.out, [args.bank])
    return 0


def _training_embeddings(args) -> Path:
    if args.train:
        return args.train
    return Path(args.bank).with_name(Path(args.bank).stem + "_embeddings.json")


def cmd_route(args) -> int:
    """Route a task to RDL or DFS."""
    from .bank import load_bank
    from .router import anchor_ratio_rule, fit_meta, load_embeddings, route

    config = load_config(args)
    targets = load_embeddings(args.embedding)
    if len(targets) != 1:
        print_error(f"{args.embedding} holds {len(targets)} embeddings; route takes one")
        return 1
    target = targets[0]

    if args.rule == "ratio":
        decision = anchor_ratio_rule(target, args.threshold, higher_is_better=not args.lower_is_better)
        train_path = None
    else:
        bank = load_bank(args.bank)
        train_path = _training_embeddings(args)
        training = load_embeddings(train_path)
        if args.budget is not None and training[0].budget is None:
            budgets = args.train_budgets or [args.budget]
            training = [e.with_budget(b) for e in training for b in budgets]
        meta = fit_meta(bank, training, args.kind, by=args.by, k=args.k)
        decision = route(meta, target, args.budget)

    print_info(f"{target.task}: {decision.family} (confidence {decision.confidence:.3f})")
    data = {"task": target.task, "budget": args.budget, "kind": args.rule or args.kind, **decision.as_dict()}
    finish(args, config, data, args.out, [args.embedding, args.bank, train_path])
    return 0


def cmd_loo(args) -> int:
    """Leave-one-task-out routing accuracy."""
    from .bank import load_bank
    from .router import load_embeddings, loo_eval

    config = load_config(args)
    bank = load_bank(args.bank)
    train_path = _training_embeddings(args)
    embeddings = load_embeddings(train_path)
    if args.budgets:
        embeddings = [e.with_budget(b) for e in embeddings for b in args.budgets]

    report = loo_eval(bank, embeddings, args.kind, by=args.by, k=args.k, threads=config.threads)
    print_table(
        f"LOO {args.kind}",
        ["task", "predicted", "actual", "margin"],
        [(r["task"], r["predicted"], r["actual"], r["margin"]) for r in report.per_task],
    )
    print_info(f"Accuracy {report.accuracy:.3f}")
    finish(args, config, report.as_dict(), args.out, [args.bank, train_path])
    return 0


def cmd_hpo(args) -> int:
    """Replay search over the bank records of one task."""
    from .bank import load_bank
    from .router import BankEvaluator, fit_meta, load_embeddings, replay_hpo, route

    config = load_config(args)
    bank = load_bank(args.bank)

    family = args.family
    inputs = [args.bank]
    if args.route:
        target = load_embeddings(args.route)[0]
        train_path = _training_embeddings(args)
        training = load_embeddings(train_path)
        decision = route(fit_meta(bank, training, args.kind, by=args.by, k=args.k), target.without_budget())
        family = decision.family
        print_info(f"Routed {args.task} to {family}")
        inputs += [args.route, train_path]

    evaluator = BankEvaluator(bank, args.task, family, exclusions=config.seed_exclusions)
    result = replay_hpo(
        evaluator,
        args.budget,
        args.generator,
        seed=config.seed,
        gamma=config.hpo.gamma,
        n_candidates=config.hpo.n_candidates,
        startup=config.hpo.startup,
        landscape_select=not args.no_landscape,
        family=family,
    )
    best = evaluator.best_possible()
    data = {**result.as_dict(), "task": args.task, "best_possible_val": best.val, "best_possible_test": best.test}
    print_info(f"Best val {result.best_val:.6g} (chosen by {result.chosen_by}), test {result.best_test}")
    finish(args, config, data, args.out, inputs)
    return 0


def cmd_similarity(args) -> int:
    """Agreement of embedding similarity with ground-truth task similarity."""
    from .bank import graphgym_similarity, load_bank, load_similarity
    from .router import Normalizer, embedding_similarity, load_embeddings, similarity_agreement, train_projection

    config = load_config(args)
    embeddings = load_embeddings(args.embeddings)
    if args.truth:
        truth = load_similarity(args.truth)
    elif args.bank:
        truth = graphgym_similarity(load_bank(args.bank), exclusions=config.seed_exclusions, threads=config.threads)
    else:
        print_error("Give --truth or --bank")
        return 1

    tasks = [e.task for e in embeddings]
    matrix = Normalizer.fit(embeddings).transform_all(embeddings)
    agreement = similarity_agreement(embedding_similarity(matrix, tasks), truth)
    data = {"before": agreement.as_dict()}

    if args.project:
        projection = train_projection(
            matrix, tasks, truth, margin=args.margin, steps=args.steps, step_size=args.step_size
        )
        projected = similarity_agreement(embedding_similarity(projection.apply(matrix), tasks), truth)
        data["after"] = projected.as_dict()
        data["projection"] = projection.as_dict()
        print_info(f"Agreement {agreement.mean:.3f} -> {projected.mean:.3f}")
    else:
        print_info(f"Agreement {agreement.mean:.3f}")

    finish(args, config, data, args.out, [args.embeddings, args.truth, args.bank])
    return 0


def cmd_correlate(args) -> int:
    """Spearman correlation of a task feature with the RDL - DFS gap."""
    from .bank import load_bank
    from .router import gap_correlation, load_embeddings

    config = load_config(args)
    train_path = _training_embeddings(args)
    result = gap_correlation(load_bank(args.bank), load_embeddings(train_path), args.feature, by=args.by)
    print_info(f"rho({args.feature}, gap) = {result.rho:.3f} (p = {result.p_value:.3g}, n = {len(result.tasks)})")
    finish(args, config, result.as_dict(), args.out, [args.bank, train_path])
    return 0


def csbm_spec(args, default=None):
    """A CSBM spec from --spec, else from the flags, else `default`."""
    from .csbm import CsbmSpec, MetapathSpec
    from .util.io import read_json

    if args.spec:
        spec = CsbmSpec.model_validate(read_json(args.spec))
    elif args.gamma or args.p:
        if args.gamma:
            degrees = args.degree or [8.0]
            if len(degrees) == 1:
                degrees = degrees * len(args.gamma)
            if len(degrees) != len(args.gamma):
                raise ValueError(f"{len(degrees)} degrees for {len(args.gamma)} gates")
            metapaths = tuple(MetapathSpec(gamma=g, degree=d) for g, d in zip(args.gamma, degrees))
        else:
            if len(args.p) != len(args.q or []):
                raise ValueError("--p and --q need the same number of values")
            metapaths = tuple(MetapathSpec(p=p, q=q) for p, q in zip(args.p, args.q))
        spec = CsbmSpec(
            n=args.n or 2000,
            prior=0.5 if args.prior is None else args.prior,
            delta=2.0 if args.delta is None else args.delta,
            metapaths=metapaths,
        )
    elif default is not None:
        spec = default
    else:
        raise ValueError("Give --spec, --gamma or --p/--q")

    if args.seed is not None:
        spec = spec.model_copy(update={"seed": args.seed})
    return spec


def cmd_csbm(args) -> int:
    """Synthetic metapath CSBM experiments."""
    from . import csbm

    config = load_config(args)

    if args.csbm_action == "sample":
        spec = csbm_spec(args)
        instance = csbm.sample(spec)
        same = instance.labels[:, None] == instance.labels[None, :]
        metapaths = []
        for adjacency in instance.adjacency:
            upper = adjacency.tocoo()
            hits = same[upper.row, upper.col]
            share = float(hits.mean()) if len(hits) else None
            metapaths.append({"edges": int(adjacency.nnz // 2), "same_label_share": share})
        data = {
            "spec": spec.model_dump(exclude_none=True),
            "positives": int((instance.labels == 1).sum()),
            "negatives": int((instance.labels == -1).sum()),
            "metapaths": metapaths,
        }
    elif args.csbm_action == "snr":
        data = csbm.snr(csbm_spec(args), args.mc_samples, config.seed).as_dict()
    elif args.csbm_action == "gating":
        if args.spec or args.gamma or args.p:
            data = csbm.gating_experiment(csbm_spec(args), args.seeds, threads=config.threads).as_dict()
        else:
            data = csbm.gating_report(args.seeds, threads=config.threads)
    else:
        spec = csbm_spec(args, default=csbm.CROSSOVER_PRESET)
        result = csbm.crossover_experiment(spec, args.grid, args.seeds, threads=config.threads)
        data = result.as_dict()
        if args.curves:
            result.save_curves(args.curves)
            print_success(f"Wrote {args.curves}")
        print_table(
            "Crossover",
            ["N", "gated", "linear"],
            [(n, g, result.mean_linear) for n, g in zip(result.grid, result.mean_gated)],
        )

    finish(args, config, data, args.out, [args.spec])
    return 0


def add_rdb_args(parser: argparse.ArgumentParser, *, task: bool = True) -> None:
    parser.add_argument("--schema", type=Path, required=True, help="schema.json descriptor")
    parser.add_argument("--data", type=Path, help="Directory of table files (default: next to the schema)")
    if task:
        parser.add_argument("--task", type=Path, required=True, help="task.json descriptor")


def add_out_arg(parser: argparse.ArgumentParser, help: str = "Output JSON (default: stdout)") -> None:
    parser.add_argument("--out", "-o", type=Path, help=help)


def add_router_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kind", choices=("knn", "logistic"), default="knn", help="Meta-classifier (default: knn)")
    parser.add_argument("--k", type=int, default=3, help="Neighbors for knn, odd (default: 3)")
    parser.add_argument("--by", choices=("val", "test"), default="val", help="Representative selection (default: val)")
    parser.add_argument(
        "--train", type=Path, help="Embeddings of the bank tasks (default: <bank stem>_embeddings.json next to the bank)"
    )


def add_csbm_spec_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spec", type=Path, help="CSBM spec JSON")
    parser.add_argument("--n", type=int, help="Nodes (default: 2000)")
    parser.add_argument("--prior", type=float, help="P(label = +1) (default: 0.5)")
    parser.add_argument("--delta", type=float, help="Score separation (default: 2)")
    parser.add_argument("--gamma", type=parse_floats, help="Gates per metapath, comma-separated")
    parser.add_argument("--degree", type=parse_floats, help="Expected degrees per metapath (one value broadcasts)")
    parser.add_argument("--p", type=parse_floats, help="Same-label edge probabilities")
    parser.add_argument("--q", type=parse_floats, help="Different-label edge probabilities")
    add_out_arg(parser)


def create_parser() -> argparse.ArgumentParser:
    """Create argument parser."""
    parser = argparse.ArgumentParser(
        prog="relatron",
        description="Relatron - relational-database task profiler and RDL/DFS router",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--config", type=Path, help="Path to config file (default: .relatron/config.json or RELATRON_CONFIG_PATH)"
    )
    parser.add_argument("--seed", type=int, help="Seed for every stochastic step (default: config, 0)")
    parser.add_argument("--threads", type=int, help="Worker threads, 0 for one per CPU (default: config, 1)")

    subparsers = parser.add_subparsers(dest="subcommand", help="Commands")

    ingest = subparsers.add_parser("ingest", help="Validate a database and print diagnostics")
    add_rdb_args(ingest, task=False)
    add_out_arg(ingest)

    prof = subparsers.add_parser("profile", help="Compute a task embedding")
    add_rdb_args(prof)
    prof.add_argument("--probes", action="store_true", help="Add the sketch, hasher and feature affinity probes")
    prof.add_argument("--heuristics", action="store_true", help="Add the entity mean/median heuristics")
    prof.add_argument("--budget", type=float, help="Append a budget feature")
    prof.add_argument("--external", type=Path, help="JSON of externally computed probe scores")
    prof.add_argument("--report", type=Path, help="Also write the full profiling report")
    add_out_arg(prof, "Embedding JSON (default: stdout)")

    homophily = subparsers.add_parser("homophily", help="Per-metapath homophily profile")
    add_rdb_args(homophily)
    homophily.add_argument("--multi-hop", action="store_true", help="Include metapaths with two intermediate types")
    homophily.add_argument("--verify", action="store_true", help="Check projections against the join oracle")
    homophily.add_argument("--shuffles", type=int, default=0, help="Label-shuffle null draws per metapath")
    add_out_arg(homophily)

    sketch = subparsers.add_parser("sketch", help="Path sketch features and affinity probes")
    add_rdb_args(sketch, task=False)
    sketch.add_argument("--task", type=Path, help="task.json; enables affinity probes")
    sketch.add_argument("--source-type", help="Node type to sketch (default: the task's entity table)")
    sketch.add_argument("--mode", choices=("dense", "tensor"), help="Sketch realization (default: config)")
    sketch.add_argument("--width", type=int, help="Sketch width d (default: config)")
    sketch.add_argument("--horizon", type=int, help="Path horizon T (default: config)")
    sketch.add_argument("--external", type=Path, help="JSON of externally computed probe scores")
    sketch.add_argument("--affinity-out", type=Path, help="Affinity scores JSON")
    sketch.add_argument("--out", "-o", type=Path, required=True, help="Feature CSV")

    landscape = subparsers.add_parser("landscape", help="Landscape metrics and post-selection")
    landscape.add_argument("surfaces", nargs="+", type=Path, help="Surface JSON files")
    landscape.add_argument("--val", type=parse_floats, help="Validation scores, one per surface")
    direction = landscape.add_mutually_exclusive_group()
    direction.add_argument("--higher-is-better", dest="higher_is_better", action="store_true", default=True)
    direction.add_argument("--lower-is-better", dest="higher_is_better", action="store_false")
    landscape.add_argument("--interpolate", action="store_true", help="Interpolate missing boundary rays")
    add_out_arg(landscape)

    bank = subparsers.add_parser("bank", help="Performance bank")
    bank_subparsers = bank.add_subparsers(dest="bank_action", help="Bank actions", required=True)

    bank_add = bank_subparsers.add_parser("add", help="Append records")
    bank_add.add_argument("--bank", type=Path, required=True, help="bank.jsonl")
    bank_add.add_argument("records", nargs="*", default=[], help="JSONL files of records ('-' for stdin)")
    bank_add.add_argument("--record", help="One record as a JSON object")

    bank_winners = bank_subparsers.add_parser("winners", help="RDL vs DFS winner per task")
    bank_winners.add_argument("--bank", type=Path, required=True, help="bank.jsonl")
    bank_winners.add_argument("--by", choices=("val", "test"), default="val", help="Representative selection")
    bank_winners.add_argument("--budget", type=int, help="Trials per family")
    add_out_arg(bank_winners)

    bank_similarity = bank_subparsers.add_parser("similarity", help="Ground-truth task similarity")
    bank_similarity.add_argument("--bank", type=Path, required=True, help="bank.jsonl")
    bank_similarity.add_argument("--min-shared", type=int, default=2, help="Shared configurations per pair")
    add_out_arg(bank_similarity)

    route_parser = subparsers.add_parser("route", help="Predict the winning family for a task")
    route_parser.add_argument("--bank", type=Path, help="bank.jsonl")
    route_parser.add_argument("--embedding", type=Path, required=True, help="Embedding JSON of the task")
    route_parser.add_argument("--budget", type=float, help="Trial budget")
    route_parser.add_argument("--train-budgets", type=parse_floats, help="Budgets to train a budgeted router on")
    route_parser.add_argument("--rule", choices=("ratio",), help="Use the affinity ratio rule instead of a router")
    route_parser.add_argument("--threshold", type=float, default=1.10, help="Ratio rule threshold (default: 1.10)")
    route_parser.add_argument("--lower-is-better", action="store_true", help="Ratio rule metric direction")
    add_router_args(route_parser)
    add_out_arg(route_parser)

    loo = subparsers.add_parser("loo", help="Leave-one-task-out router accuracy")
    loo.add_argument("--bank", type=Path, required=True, help="bank.jsonl")
    loo.add_argument("--budgets", type=parse_floats, help="Evaluate (task, budget) pairs")
    add_router_args(loo)
    add_out_arg(loo)

    hpo = subparsers.add_parser("hpo", help="Replay hyperparameter search")
    hpo.add_argument("--bank", type=Path, required=True, help="bank.jsonl")
    hpo.add_argument("--task", required=True, help="Task name in the bank")
    hpo.add_argument("--budget", type=int, required=True, help="Trials")
    hpo.add_argument("--generator", choices=("random", "tpe"), default="tpe", help="Config generator")
    hpo.add_argument("--family", choices=("rdl", "dfs"), help="Restrict to one family")
    hpo.add_argument("--route", type=Path, help="Embedding JSON; route first and search the chosen family")
    hpo.add_argument("--no-landscape", action="store_true", help="Skip landscape post-selection")
    add_router_args(hpo)
    add_out_arg(hpo)

    similarity = subparsers.add_parser("similarity", help="Embedding vs ground-truth similarity agreement")
    similarity.add_argument("--embeddings", type=Path, required=True, help="Embeddings JSON")
    similarity.add_argument("--truth", type=Path, help="Similarity JSON from `bank similarity`")
    similarity.add_argument("--bank", type=Path, help="bank.jsonl to derive the ground truth from")
    similarity.add_argument("--project", action="store_true", help="Train a linear projection")
    similarity.add_argument("--margin", type=float, default=0.1, help="Triplet margin")
    similarity.add_argument("--steps", type=int, default=200, help="Gradient steps")
    similarity.add_argument("--step-size", type=float, default=0.1, help="Initial step size")
    add_out_arg(similarity)

    correlate = subparsers.add_parser("correlate", help="Feature vs RDL - DFS gap correlation")
    correlate.add_argument("--bank", type=Path, required=True, help="bank.jsonl")
    correlate.add_argument("--feature", required=True, help="Embedding feature name")
    correlate.add_argument("--by", choices=("val", "test"), default="val", help="Representative selection")
    correlate.add_argument("--train", type=Path, help="Embeddings (default: <bank stem>_embeddings.json)")
    add_out_arg(correlate)

    csbm = subparsers.add_parser("csbm", help="Synthetic metapath CSBM laboratory")
    csbm_subparsers = csbm.add_subparsers(dest="csbm_action", help="CSBM actions", required=True)

    csbm_sample = csbm_subparsers.add_parser("sample", help="Draw one instance and summarize it")
    add_csbm_spec_args(csbm_sample)

    csbm_snr = csbm_subparsers.add_parser("snr", help="Linear and gated SNR proxies")
    add_csbm_spec_args(csbm_snr)
    csbm_snr.add_argument("--mc-samples", type=int, default=20_000, help="Monte Carlo draws per class")

    csbm_gating = csbm_subparsers.add_parser("gating", help="Gated vs linear error (all regimes without a spec)")
    add_csbm_spec_args(csbm_gating)
    csbm_gating.add_argument("--seeds", type=int, default=20, help="Seeds (at least 10)")

    csbm_crossover = csbm_subparsers.add_parser("crossover", help="Error vs revealed labels N")
    add_csbm_spec_args(csbm_crossover)
    csbm_crossover.add_argument("--grid", type=parse_ints, default=[10, 30, 100, 300, 1000], help="N grid")
    csbm_crossover.add_argument("--seeds", type=int, default=30, help="Seeds")
    csbm_crossover.add_argument("--curves", type=Path, help="CSV of N, gated_error, linear_error")

    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "profile": cmd_profile,
    "homophily": cmd_homophily,
    "sketch": cmd_sketch,
    "landscape": cmd_landscape,
    "bank": cmd_bank,
    "route": cmd_route,
    "loo": cmd_loo,
    "hpo": cmd_hpo,
    "similarity": cmd_similarity,
    "correlate": cmd_correlate,
    "csbm": cmd_csbm,
}


def dispatch(argv: list[str] | None = None) -> int:
    """Run one command and return its exit code; argparse exits with 2 on usage errors."""
    parser = create_parser()
    args = parser.parse_args(argv)

    if not args.subcommand:
        parser.print_help(sys.stderr)
        return 2

    action = getattr(args, f"{args.subcommand}_action", None)
    args.command_name = f"{args.subcommand} {action}" if action else args.subcommand

    try:
        return COMMANDS[args.subcommand](args)
    except (RelatronError, ValueError) as e:
        logger.debug("%s failed", args.command_name, exc_info=True)
        QueueListener.flush_all()
        print_error(str(e))
        return 1


def main():
    """Run the CLI."""
    process.setup()
    code = dispatch()
    QueueListener.stop_all()
    sys.exit(code)


if __name__ == "__main__":
    main()
