# # The optimal gain is optimal for more than the trace
#
# A measurement update takes a prior covariance `P`, a measurement operator
# `H` and a measurement noise covariance `R`, and for any gain `K` produces
# the posterior covariance
#
#     P_K = (I - K H) P (I - K H)^T + K R K^T.
#
# The usual Kalman gain `K* = P H^T (H P H^T + R)^{-1}` is derived by
# minimizing the trace of `P_K`.  This script walks through a small example
# and shows that the same gain also minimizes the determinant and the
# smallest eigenvalue.

# In[1]:

import numpy as np

from kalman_spectral import (
    Det,
    KalmanProblem,
    SmallestEig,
    Trace,
    eval_objective,
    loewner_gap,
    objective_grad_K,
    sym_eigvals,
)

np.set_printoptions(precision=5, suppress=True)

# A two-dimensional state observed through one noisy scalar measurement of
# the first coordinate plus half the second.

# In[2]:

P = np.array([[2.0, 0.3], [0.3, 0.5]])
R = np.array([[0.25]])
H = np.array([[1.0, 0.5]])
prob = KalmanProblem(P, R, H)

print("K* =\n", prob.gain)
print("P_K* =\n", prob.posterior)
print("eigenvalues of P_K*:", sym_eigvals(prob.posterior))

# ## Sweeping the gain
#
# Move away from `K*` along a fixed direction and evaluate three uncertainty
# measures.  All three bottom out at `eps = 0`.

# In[3]:

direction = np.array([[1.0], [-0.4]])
objectives = [Trace(), Det(), SmallestEig()]
print(f"{'eps':>6}" + "".join(f"{str(o):>12}" for o in objectives))
for eps in np.linspace(-0.3, 0.3, 7):
    K = prob.gain + eps * direction
    row = [eval_objective(prob, K, o) for o in objectives]
    print(f"{eps:6.2f}" + "".join(f"{v:12.6f}" for v in row))

# The gradients with respect to `K` vanish at `K*` for each of them: every
# gradient has the form `2 W (K S - P H^T)`, and the second factor is zero
# at the optimal gain no matter what `W = d phi / d P_K` is.

# In[4]:

for o in objectives:
    g = objective_grad_K(prob, prob.gain, o)
    print(f"{str(o):>6}: max |grad| at K* = {np.abs(g).max():.2e}")

# ## Why: the posterior never gets smaller than at K*
#
# Completing the square in the Joseph form gives
# `P_K - P_K* = (K - K*) S (K - K*)^T`, a positive semidefinite matrix.
# Every eigenvalue of `P_K` is therefore at least the matching eigenvalue
# of `P_K*`, and any measure that increases with the eigenvalues is minimized
# at `K*`.

# In[5]:

rng = np.random.default_rng(0)
for _ in range(3):
    K = prob.gain + rng.standard_normal(prob.gain.shape)
    gap = loewner_gap(prob, K)
    print("eigenvalues of P_K - P_K*:", sym_eigvals(gap))
