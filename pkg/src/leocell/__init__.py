"""Cycle-by-cycle degradation models for Li-ion cells under orbital duty cycling.

Models retained capacity (percent of rated) and end-of-discharge voltage over
charge-discharge cycle counts, with two model families: multivariate linear
regression and a small feedforward network trained by backpropagation. Ships a
deterministic synthetic data generator and a method-comparison statistics
suite (AAPE, Pearson r, coefficient of variation, Bland-Altman).
"""

__version__ = "0.1.0"
