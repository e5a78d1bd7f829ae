"""Session fixtures: the synthetic testbed, its on-disk form, and trained models."""

import time
from types import SimpleNamespace

import pytest

from covbias import write_mono, write_parallel
from covbias.cli import main as cli_main

from synthbed import make_testbed

N_TUNE = 500
LM_ORDER = 3
LM_MIN_COUNT = 2


@pytest.fixture(scope="session")
def bed():
    return make_testbed()


@pytest.fixture(scope="session")
def bed_dir(bed, tmp_path_factory):
    """The testbed written out the way a user would have it on disk."""
    root = tmp_path_factory.mktemp("bed")

    def path(name):
        return str(root / name)

    files = SimpleNamespace(
        root=root,
        src_mono=path("src_mono.txt"),
        tgt_mono=path("tgt_mono.txt"),
        src_heldout=path("src_heldout.txt"),
        tgt_heldout=path("tgt_heldout.txt"),
        tune_src=path("tune.src"),
        tune_tgt=path("tune.tgt"),
        tune_gold=path("tune.gold"),
        eval_src=path("eval.src"),
        eval_tgt=path("eval.tgt"),
        eval_gold=path("eval.gold"),
        eval_src_pos=path("eval.src.pos"),
        n_eval=len(bed.pairs) - N_TUNE,
    )
    write_mono(bed.src_mono, files.src_mono)
    write_mono(bed.tgt_mono, files.tgt_mono)
    write_mono(bed.src_heldout, files.src_heldout)
    write_mono(bed.tgt_heldout, files.tgt_heldout)

    tune_pairs, eval_pairs = bed.pairs[:N_TUNE], bed.pairs[N_TUNE:]
    tune_gold, eval_gold = bed.gold[:N_TUNE], bed.gold[N_TUNE:]
    write_parallel(tune_pairs, files.tune_src, files.tune_tgt)
    write_parallel(eval_pairs, files.eval_src, files.eval_tgt)
    with open(files.tune_gold, "w", encoding="utf-8") as handle:
        handle.writelines(label.code + "\n" for label in tune_gold)
    with open(files.eval_gold, "w", encoding="utf-8") as handle:
        handle.writelines(label.code + "\n" for label in eval_gold)
    write_mono([pair.source_pos for pair in eval_pairs], files.eval_src_pos)
    return files


@pytest.fixture(scope="session")
def bed_models(bed_dir):
    """Both language models trained through the command line, with timing."""
    source = str(bed_dir.root / "src.lm")
    target = str(bed_dir.root / "tgt.lm")
    started = time.perf_counter()
    for mono, model in ((bed_dir.src_mono, source), (bed_dir.tgt_mono, target)):
        code = cli_main(
            [
                "train-lm",
                "--input",
                mono,
                "--output",
                model,
                "--order",
                str(LM_ORDER),
                "--min-count",
                str(LM_MIN_COUNT),
            ]
        )
        assert code == 0, f"train-lm failed on {mono}"
    train_seconds = time.perf_counter() - started
    return SimpleNamespace(source=source, target=target, train_seconds=train_seconds)
