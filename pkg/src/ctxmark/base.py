"""Estimator plumbing: scikit-learn style parameter handling.

The mixin gives any class whose ``__init__`` stores each argument verbatim a
``get_params``/``set_params`` pair, which is all ``sklearn.base.clone`` and
pipeline tooling need. No scikit-learn import is required.
"""
from __future__ import annotations

import inspect


class ParamsMixin:
    """get_params/set_params derived from the ``__init__`` signature."""

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        names = []
        for name, p in sig.parameters.items():
            if name == "self":
                continue
            if p.kind in (p.VAR_POSITIONAL, p.VAR_KEYWORD):
                raise TypeError(
                    f"{cls.__name__}.__init__ may not use *args/**kwargs with ParamsMixin"
                )
            names.append(name)
        return names

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"
