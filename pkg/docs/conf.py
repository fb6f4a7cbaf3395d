# Sphinx configuration for the carto API, repository and services reference.
import sys
import os


sys.path.append(os.path.abspath(".."))


project = "carto"
copyright = "2026, carto maintainers"
author = "carto maintainers"

extensions = ["sphinx.ext.autodoc"]
autodoc_member_order = "bysource"

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

html_theme = "nature"
html_static_path = ["_static"]
