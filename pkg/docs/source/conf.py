# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

sys.path.insert(0, os.path.abspath("../.."))

# -- Project information -----------------------------------------------------

project = "semifree-tfd"
author = "semifree-tfd developers"

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.viewcode",
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.napoleon",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "autodocsumm",
]

intersphinx_mapping = {
    "sympy": ("https://docs.sympy.org/latest/", None),
    "networkx": ("https://networkx.org/documentation/stable/", None),
}

autodoc_default_options = {
    "autosummary": True,
}

templates_path = ["_templates"]
exclude_patterns = ["_build"]

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_show_sourcelink = True

autosummary_generate = True
autodoc_typehints = "description"
autodoc_member_order = "bysource"
