"""Toggles controlling one translation run."""

from dataclasses import dataclass


@dataclass(frozen=True)
class TranslationOptions:
    strict: bool = False
    emit_excep_msg: bool = False
    response_out: bool = False
    emit_imports: bool = False
    check_only: bool = False
