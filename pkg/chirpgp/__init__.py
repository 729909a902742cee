from .exceptions import *
from .bijections import *
from .gaussian import *
from .model import *
from .quadrature import *
from .simulate import *
from .filters import *
from .mle import *
from .baselines import *
from .bounds import *
from .fileio import *
