"""Regenerate configs/fig1.json and configs/fig2.json from the presets."""

import json
from pathlib import Path

from usfspec import presets

ROOT = Path(__file__).resolve().parents[1] / "configs"


def config(params, epsilon, description):
    return {
        "description": description,
        "components": params.to_dict()["components"],
        "epsilon": epsilon,
        "step": 1.0,
        "count": presets.N_SAMPLES,
        "noise_sigma": 0.1,
        "seed": 2025,
        "psnr_grid_db": list(presets.PSNR_GRID_DB),
        "trials": 1000,
    }


def main():
    ROOT.mkdir(exist_ok=True)
    fig1 = config(
        presets.fig1_params(),
        presets.FIG1_EPSILON,
        "single tone, wT=1.05, a=1, lambda=1-epsilon; phase puts folds at n=2 and n=5",
    )
    fig2 = config(
        presets.fig2_params(),
        presets.FIG2_EPSILON,
        "two tones, wT={0.63,1.00}, a={1,1}, lambda=2-epsilon; crests aligned at n=2",
    )
    for name, cfg in (("fig1", fig1), ("fig2", fig2)):
        (ROOT / f"{name}.json").write_text(json.dumps(cfg, indent=2) + "\n")


if __name__ == "__main__":
    main()
