"""Representative cover-source selection: regret matrices, greedy set covering, and parameter importance."""

from csmcover._core import *  # noqa: F401,F403
from csmcover._core import ValidationError, __doc__  # noqa: F401
