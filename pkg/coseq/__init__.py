__version__ = "0.1.0"

# pylint: disable=wrong-import-position
from .logger import *
from .exceptions import *
from .config import get_config, CoseqConfig, ConfigLoader
from .synthio import Corpus, Task, Step, generate_corpus, load_corpus, save_corpus, split_corpus
from .captioner import contextualize
from .embedder import Embedder, train_embedder
from .diffuser import DiffuserModel, train_diffuser
from .selector import SelectionHead, select, train_selector
from .pipeline import ModelBundle, GenerationTrace, synthesize_task, synthesize_corpus
