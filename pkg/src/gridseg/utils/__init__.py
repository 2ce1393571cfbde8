# Empty init file - utils are imported directly from submodules
