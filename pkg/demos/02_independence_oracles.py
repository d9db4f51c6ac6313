"""One independence structure, four ways of querying it.

The same linear model is interrogated through the true graph, its exact
covariance, a thresholded covariance, and a finite sample. The first
two always agree on faithful models; the finite-sample view carries
the two error types every downstream learner has to live with.
"""

import numpy as np

from spdag import (
    GenConfig,
    TestConfig,
    covariance_of,
    dsep_backend,
    fisher_z_backend,
    gaussian_exact_backend,
    iter_triples,
    lambda_backend,
    partial_correlation,
    random_sem,
    sample,
)

rng = np.random.default_rng(20)
sem = random_sem(GenConfig(p=5, expected_nbhd=1.5), rng)
sigma = covariance_of(sem)
print("model edges:", sorted(sem.dag.edges))
print("weights:", {e: round(w, 3) for e, w in sorted(sem.weights.items())})

# Route 1: the graph itself, via d-separation.
graph_oracle = dsep_backend(sem.dag)

# Route 2: the population covariance. A partial correlation of exactly
# zero is the Gaussian fingerprint of conditional independence.
exact_oracle = gaussian_exact_backend(sigma)

disagreements = sum(
    graph_oracle.is_independent(j, k, s) != exact_oracle.is_independent(j, k, s)
    for j, k, s in iter_triples(5)
)
print("\ngraph vs covariance disagreements:", disagreements)

# A couple of the underlying numbers.
j, k = sorted(sem.dag.edges)[0]
print(f"partial corr of adjacent pair {(j, k)} given rest:",
      round(partial_correlation(sigma, j, k, set(range(5)) - {j, k}), 4))

# Route 3: thresholding. With a huge lambda everything below it looks
# independent; the oracle's independence set can only grow with lambda.
for lam in (1e-9, 0.2, 0.9):
    n_indep = sum(
        lambda_backend(sigma, lam).is_independent(j, k, s)
        for j, k, s in iter_triples(5)
    )
    print(f"lambda={lam:<5} independent triples: {n_indep}")

# Route 4: a finite sample pushed through the z-transform test. Missed
# dependencies (low power) die out as n grows; false alarms do not, they
# are pinned near the test size alpha forever. At the largest n below,
# one unlucky fluctuation around the isolated vertex shows up in several
# overlapping triples at once.
print(f"\n{'n':>6}  missed dependencies  false alarms")
for n in (200, 2000, 50000):
    data = sample(sem, n, np.random.default_rng(1))
    test = fisher_z_backend(data, TestConfig(alpha=0.001))
    missed = false_alarm = 0
    for j, k, s in iter_triples(5):
        said, truth = test.is_independent(j, k, s), graph_oracle.is_independent(j, k, s)
        if said and not truth:
            missed += 1
        elif truth and not said:
            false_alarm += 1
    print(f"{n:>6}  {missed:>19}  {false_alarm:>12}")
