# simple warning formatting
import warnings

warnings.formatwarning = lambda msg, *a: str(msg)

from .lattice import *
from .exceptional import *
from .dh_engine import *
from .localization import *
from .splitting import *
from .toric import *
from .io import *
from .classifier import *

__version__ = "0.1.0"
