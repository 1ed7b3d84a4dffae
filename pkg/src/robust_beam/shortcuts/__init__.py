"""The robust-beam library - shortcut functions."""
