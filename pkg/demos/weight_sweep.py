# coding: utf-8

# # Sweeping the weight
#
# Along an increasing grid of weights the largest gradient of the denoised
# image shrinks and reaches zero at the threshold.  A sweep warm-starts each
# run from the previous one.

import numpy as np

from tvlam import lambda_bnd_2d, sweep

rng = np.random.default_rng(2)
y = rng.standard_normal((24, 24))
top = lambda_bnd_2d(y).lambda_value
lambdas = np.geomspace(1e-2 * top, top, 12)

result = sweep(y, lambdas)
print(result.to_csv())


# The last row sits at the bound, so its gradient is numerically zero.

last = result.rows[-1]
print("grad sup-norm at lambda_bnd:", last.grad_inf_norm)
