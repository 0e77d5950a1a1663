"""Physical constants and common defaults (SI units)."""

import numpy as np
from scipy import constants as _const

HBAR = _const.hbar
ELEMENTARY_CHARGE = _const.e
EPSILON_0 = _const.epsilon_0
ATOMIC_MASS = _const.u

# 9Be+ : the workhorse ion for this kind of chain.
MASS_BE9 = 9.012182 * ATOMIC_MASS

# Counter-propagating Raman pair at 313 nm hitting the chain at 45 degrees
# each gives a beat wavevector of sqrt(2) * 2 pi / lambda along the axis.
RAMAN_WAVEVECTOR_BE9 = np.sqrt(2.0) * 2.0 * np.pi / 313e-9
