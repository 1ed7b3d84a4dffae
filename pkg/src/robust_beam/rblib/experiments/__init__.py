"""The robust-beam experiments, one class per experiment."""
