"""Sampling and convergence experiments."""

import time

import click
import numpy as np
from click import echo, option

from ..config import load_config
from ..core import perm_to_json
from ..measures import converge_point
from ..records import ExperimentRecord, write_records
from ..sampling import McmcConfig, mcmc_chains, sample_exact
from .utils import (
    format_float,
    handle_errors,
    k_option,
    parse_int_list,
    pattern_option,
    progress_bar,
    resolve_pattern,
    seed_option,
    stderr_console,
    write_json,
)


@click.command()
@option('-n', '--n', 'n', type=click.IntRange(min=1), required=True, help="Size N")
@k_option
@pattern_option
@option('-m', '--method', type=click.Choice(["exact", "mcmc"]), default="exact", show_default=True)
@option('-c', '--count', type=click.IntRange(min=1), default=10, show_default=True,
        help="Samples (exact), or samples per chain when --steps is not given (mcmc)")
@option('--steps', type=click.IntRange(min=1), help="Post-burn-in proposals per chain (mcmc)")
@option('--burnin', type=click.IntRange(min=0), help="Burn-in proposals (mcmc) [default: 50 N²]")
@option('--thin', type=click.IntRange(min=1), help="Keep every thin-th state (mcmc) [default: N²]")
@option('--chains', type=click.IntRange(min=1), default=1, show_default=True, help="Independent chains (mcmc)")
@option('-w', '--workers', type=click.IntRange(min=1), help="Worker processes for chains")
@seed_option
@option('-o', '--out', type=click.Path(dir_okay=False), help="Write JSON here instead of stdout")
@handle_errors
def sample(
    n: int,
    k: int | None,
    pattern,
    method: str,
    count: int,
    steps: int | None,
    burnin: int | None,
    thin: int | None,
    chains: int,
    workers: int | None,
    seed: int,
    out: str | None,
):
    """Draw random avoiders as a JSON array of window objects.

    Exact sampling draws uniformly from the enumerated avoiders and needs
    N within the brute-force cap. MCMC runs a Metropolis chain from the
    identity; chain c is seeded seed ^ c and chains are concatenated in order.

    \b
    Examples:
      affperm sample -n 5 -k 2 -c 100 -s 7
      affperm sample -n 50 -k 2 -m mcmc -c 20 -o samples.json
      affperm sample -n 4 -p 321 -m mcmc --steps 100000 --thin 16 --chains 4
    """
    tau = resolve_pattern(k, pattern)
    config = load_config()
    if method == "exact":
        rng = np.random.default_rng(seed)
        perms = [sample_exact(n, tau, rng) for _ in range(count)]
    else:
        thin = n * n if thin is None else thin
        cfg = McmcConfig.for_size(
            n,
            steps=count * thin if steps is None else steps,
            seed=seed,
            swap_prob=config.swap_prob,
            burn_in=burnin,
            thin=thin,
            offset_prob=config.offset_prob,
        )
        runs = mcmc_chains(n, tau, cfg, chains, config.workers if workers is None else workers)
        perms = [sigma for run in runs for sigma in run]
    write_json([perm_to_json(sigma) for sigma in perms], out)


@click.command()
@option('-k', '--k', type=click.IntRange(min=1), required=True, help="Avoid (k+1)...1")
@option('-S', '--sizes', callback=parse_int_list, default="4,8,16,32", show_default=True,
        help="Comma-separated sizes N")
@option('--samples', type=click.IntRange(min=1), default=40, show_default=True, help="Samples S per size")
@option('-M', '--segments', type=click.IntRange(min=1), help="Atoms per segment [default: 10 N]")
@seed_option
@option('-w', '--workers', type=click.IntRange(min=1), help="Worker processes for cost matrices")
@option('--timing/--no-timing', default=True, show_default=True,
        help="Record wall time; --no-timing writes 0 for byte-identical files")
@option('-o', '--out', type=click.Path(dir_okay=False), help="Write records (.csv, .json or .parquet)")
@handle_errors
def converge(
    k: int,
    sizes: list[int],
    samples: int,
    segments: int | None,
    seed: int,
    workers: int | None,
    timing: bool,
    out: str | None,
):
    """Estimate Wass₂ between random avoiders and the limit law, per size.

    Sizes within the brute-force cap sample exactly; larger sizes use MCMC
    and are heuristic.

    \b
    Examples:
      affperm converge -k 2 -S 4,8,16,32 -s 1 -o results.csv
      affperm converge -k 3 -S 8,16 --samples 20 -M 100 --no-timing
    """
    config = load_config()
    workers = config.workers if workers is None else workers
    records = []
    with progress_bar(stderr_console(), "converge") as progress:
        task = progress.add_task("", total=len(sizes))
        for n in sizes:
            progress.update(task, description=f"N={n}")
            m = config.segments_per_n * n if segments is None else segments
            start = time.perf_counter()
            estimate = converge_point(
                k, n, samples, m, seed,
                swap_prob=config.swap_prob, workers=workers, offset_prob=config.offset_prob,
            )
            elapsed = time.perf_counter() - start if timing else 0.0
            records.append(ExperimentRecord(
                command="converge",
                parameters={"k": k, "N": n, "samples": samples, "segments": m},
                outputs={"wass2_estimate": estimate},
                seed=seed,
                elapsed_seconds=elapsed,
            ))
            progress.advance(task)

    for r in records:
        echo(f"{r.parameters['N']}\t{format_float(r.outputs['wass2_estimate'])}")
    if out:
        write_records(out, records)
