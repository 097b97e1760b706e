#!/usr/bin/env python3
"""Spin up the prototype service on synthetic data: generates a corpus,
fits tf-idf, writes a service config, and starts serving."""

import argparse
import json
import sys
from pathlib import Path

from ticketrec.cli import main as cli_main
from ticketrec.corpus import save_tickets
from ticketrec.synthetic import make_synthetic_corpus
from ticketrec.techniques import TfidfTechnique, save_artifact


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--work-dir", default="demo_service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8900)
    args = parser.parse_args()

    work = Path(args.work_dir)
    work.mkdir(parents=True, exist_ok=True)
    corpus = make_synthetic_corpus(seed=13)
    corpus_path = work / "corpus.jsonl"
    save_tickets(corpus, corpus_path)

    technique = TfidfTechnique()
    technique.fit(corpus)
    artifact = work / "tfidf.model.json"
    save_artifact(technique, artifact)

    config_path = work / "service.json"
    config_path.write_text(
        json.dumps(
            {
                "model_artifact": str(artifact),
                "corpus_path": str(corpus_path),
                "store_dir": str(work / "store"),
                "host": args.host,
                "port": args.port,
            },
            indent=2,
        )
    )
    print(f"config written to {config_path}; starting service ...")
    return cli_main(["serve", "--config", str(config_path)])


if __name__ == "__main__":
    sys.exit(main())
