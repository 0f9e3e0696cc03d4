"""Formal WKB operator calculus and crossed-module Cech cohomology on finite covers."""
