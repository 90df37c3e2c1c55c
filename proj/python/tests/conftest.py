import os
import sys

# Allow running straight from a source checkout: put the package directory and
# the CMake build tree (where the extension lands) on the path if the install
# isn't already importable.
_here = os.path.dirname(os.path.abspath(__file__))
_root = os.path.dirname(os.path.dirname(_here))
for cand in (os.environ.get("CZLAB_BUILD_DIR"), os.path.join(_root, "build"),
             os.path.join(_root, "python")):
    if cand and os.path.isdir(cand) and cand not in sys.path:
        sys.path.insert(0, cand)
