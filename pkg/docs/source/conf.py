# Configuration file for the Sphinx documentation builder.
#
# Options reference:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Path setup --------------------------------------------------------------

from pathlib import Path
import sys

robust_beam_src = str(Path(__file__).resolve().parents[2] / "src")
sys.path.insert(0, robust_beam_src)


# -- Project information -----------------------------------------------------

project = "robust-beam"
copyright = "2023, robust-beam developers"
author = "robust-beam developers"


# -- General configuration ---------------------------------------------------

extensions = ["sphinx.ext.autodoc", "sphinx.ext.mathjax", "autoapi.extension"]
autodoc_typehints = "description"

autoapi_type = "python"
autoapi_dirs = [robust_beam_src]
autoapi_ignore = ["*/tests/*", "*noxfile.py", "*conf.py"]

templates_path = ["_templates"]
exclude_patterns = []


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
