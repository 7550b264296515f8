UI_MESSAGE_ERROR_PREFIX = "Error: "
UI_MESSAGE_CONFIG_EXISTS = "Configuration file already exists: "
UI_MESSAGE_CONFIG_CREATED = "Created configuration file: "
UI_MESSAGE_CONFIG_FAILED = "Failed to create configuration file: "
UI_MESSAGE_INVALID_CONFIG_FORMAT = "Invalid config format: "
UI_MESSAGE_CORPUS_WRITTEN = "Corpus written to "
UI_MESSAGE_MODEL_SAVED = "Saved checkpoint: "
UI_MESSAGE_SEQUENCE_WRITTEN = "Sequence written to "
UI_MESSAGE_REPORT_WRITTEN = "Report written to "
UI_MESSAGE_CAPTIONS_HEADER = "Captions for "
UI_MESSAGE_EMBEDDER_RESULT = "Embedder trained: loss {initial:.3f} -> {final:.3f}, held-out top-1 retrieval {retrieval:.3f}"
UI_MESSAGE_DIFFUSER_RESULT = "Diffuser trained: loss {initial:.4f} -> {final:.4f}"
UI_MESSAGE_SELECTOR_RESULT = (
    "Selector ({variant}) trained: held-out accuracy {accuracy:.3f} (untrained {untrained:.3f}, chance {chance:.3f})"
)
UI_MESSAGE_NONLINEARITY_RESULT = "Source-step hit rate {hit:.3f} vs always-previous {baseline:.3f} over {n} decisions (p={p:.3g})"
