# ilab/__main__.py
# python -m ilab <experimento> ...

import sys

from .cli import main

sys.exit(main())
