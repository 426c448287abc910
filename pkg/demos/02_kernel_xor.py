"""Kernel training on XOR, the dataset no linear classifier can split.

The kernel variant writes the weight vector as a combination of training
images, w = sum_j lambda_j phi(x_j), so the whole program runs on the Gram
matrix.  Samples whose coefficient survives are the support vectors; with an
rbf kernel four points are enough to carve XOR.
"""

import numpy as np

from mcm import KernelSpec, TrainConfig, decision_many, predict_many, train

X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
y = np.array([-1.0, -1.0, 1.0, 1.0])

config = TrainConfig("kernel", C=1e4, kernel=KernelSpec("rbf", gamma=1.0))
result = train(X, y, config)
model = result.model

print("XOR corners, rbf(gamma=1), C=1e4:")
print(f"  support vectors: {model.sv_count} of {len(y)}")
print(f"  lambda = {np.round(model.lam, 4)}")
print(f"  b = {model.b:.4f}, h = {model.h:.4f}")
print(f"  training predictions: {predict_many(model, X)} (labels {y.astype(int)})")

# decision surface on a coarse grid: +/- regions form the XOR checkerboard
print("\ndecision surface (rows: x2 = 1.2 down to -0.2):")
grid = np.linspace(-0.2, 1.2, 15)
for x2 in grid[::-1]:
    points = np.column_stack([grid, np.full_like(grid, x2)])
    row = "".join("+" if v >= 0 else "." for v in decision_many(model, points))
    print(f"  {row}")
print("  (columns: x1 = -0.2 across to 1.2)")
