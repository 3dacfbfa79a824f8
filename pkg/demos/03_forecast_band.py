"""Posterior forecast band for a GJR-GARCH(1,1) variance path.

Every posterior draw gives its own multi-step variance forecast; the band
is the central 95% of those paths at each horizon.  Realized squared
returns from the test segment are printed alongside for reference.

    python demos/03_forecast_band.py --horizon 10
"""

import argparse

import numpy as np

from garchvi import ModelSpec, OptimizerConfig, Prior, fit, forecast_bands, simulate, split_train_test
from garchvi.timeseries import backcast_variance


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizon", type=int, default=10)
    ap.add_argument("--seed", type=int, default=2)
    args = ap.parse_args()

    spec = ModelSpec.parse("GJR-GARCH(1,1)")
    series = simulate(spec, [0.05, 0.03, 0.12, 0.85], 3000, seed=args.seed)
    train, test = split_train_test(series, 0.75)

    res = fit(spec, train, Prior(1.0), OptimizerConfig(seed=args.seed))
    band = forecast_bands(spec, res.posterior_samples, train, args.horizon, level=0.95,
                          h0=backcast_variance(train.returns, 1))

    print(f"{'date':12s}{'lower':>9s}{'mean':>9s}{'upper':>9s}{'r^2':>9s}")
    for k in range(args.horizon):
        r2 = test.returns[k] ** 2
        print(f"{str(band.dates[k]):12s}{band.lower[k]:9.3f}{band.point[k]:9.3f}{band.upper[k]:9.3f}{r2:9.3f}")
    width = np.mean(band.upper - band.lower)
    print(f"mean band width {width:.3f}")


if __name__ == "__main__":
    main()
