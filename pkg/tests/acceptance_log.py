"""Shared record of acceptance outcomes, printed at the end of the session."""

import functools

RESULTS: dict[int, tuple[str, bool, str]] = {}


def criterion(number: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                RESULTS[number] = (title, False, f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
                raise
            RESULTS[number] = (title, True, detail or "")

        return run

    return wrap
