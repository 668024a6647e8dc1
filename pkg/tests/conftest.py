import sys
from pathlib import Path

# lets test modules import the shared oracles and scenario scripts
sys.path.insert(0, str(Path(__file__).parent))
