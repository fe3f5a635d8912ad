"""Where the pilot-driven policies work, and where they drown.

The pilot flyover measures per-stop gain sums of about 6e-6.  Whether
that measurement is usable depends entirely on the receiver noise:

* at noise variance 1e-10 (std 1e-5) the pilot SNR is below unity --
  most rounds see a non-positive sum and must be rejected, and the
  surviving coefficients are built from noise;
* at 1e-12 and below the pilots are clean and the pilot-driven rules
  beat the location-incognizant benchmark by around 10 dB.

This script scans the noise axis and prints the rejection rate and the
paired benchmark gap at each point.
"""

from dataclasses import replace

from aircomp import ExperimentConfig, compare_policies, estimate_mse

base = ExperimentConfig(trials=50_000, seed=31)

print(f"{'noise var':>10}  {'rejected':>9}  {'gap vs benchmark':>17}")
for noise in (1e-10, 1e-11, 1e-12, 1e-13, 0.0):
    cfg = replace(base, noise_var=noise)
    est = estimate_mse(cfg, "heuristic")
    rejected = est.trials_rejected / (est.trials_used + est.trials_rejected)
    gap = compare_policies(cfg, "benchmark", "heuristic")
    label = f"{noise:.0e}" if noise else "0"
    print(f"{label:>10}  {rejected:>8.1%}  {gap.gap_db:+9.2f} dB "
          f"(se {gap.std_err_db:.2f})")

print(
    "\nat 1e-10 the pilot sums (about 6e-6) sit below the noise std (1e-5):"
    "\nmost rounds are rejected and the gap collapses; two decades lower the"
    "\nsame rules recover the full advantage.  Experiments therefore state"
    "\ntheir noise level explicitly; nothing is tuned silently."
)
