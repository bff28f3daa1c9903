# MIT License
#
# Copyright (c) 2022 The nafdsim developers
#
# Licensed under the MIT License. See the LICENSE file in the project root.
__version__ = '0.1.0'
