"""HTTP service exposing the converter.

Run with: uvicorn xml2jsp.service:app
"""

from fastapi import FastAPI, Response
from pydantic import BaseModel, Field

from .diagnostics import Diagnostic
from .options import TranslationOptions
from .pipeline import translate_text, validate_text
from .schema import builtin_schema, export_xsd_string

app = FastAPI(title="xml2jsp", description="Tag-dialect XML to JSP translation service")


class TranslateRequest(BaseModel):
    source: str = Field(description="XML document text")
    strict: bool = False
    emit_excep_msg: bool = False
    response_out: bool = False
    emit_imports: bool = False


class ValidateRequest(BaseModel):
    source: str


class DiagnosticModel(BaseModel):
    severity: str
    code: str
    line: int
    column: int
    message: str

    @classmethod
    def from_diagnostic(cls, diagnostic: Diagnostic) -> "DiagnosticModel":
        return cls(
            severity=diagnostic.severity.value,
            code=diagnostic.code,
            line=diagnostic.position.line,
            column=diagnostic.position.column,
            message=diagnostic.message,
        )


class TranslateResponse(BaseModel):
    ok: bool
    jsp: str | None
    diagnostics: list[DiagnosticModel]


class ValidateResponse(BaseModel):
    ok: bool
    diagnostics: list[DiagnosticModel]


@app.post("/translate", response_model=TranslateResponse)
def translate(request: TranslateRequest) -> TranslateResponse:
    options = TranslationOptions(
        strict=request.strict,
        emit_excep_msg=request.emit_excep_msg,
        response_out=request.response_out,
        emit_imports=request.emit_imports,
    )
    result = translate_text(request.source, options)
    return TranslateResponse(
        ok=result.ok,
        jsp=result.text,
        diagnostics=[DiagnosticModel.from_diagnostic(d) for d in result.diagnostics],
    )


@app.post("/validate", response_model=ValidateResponse)
def validate(request: ValidateRequest) -> ValidateResponse:
    diagnostics = validate_text(request.source)
    return ValidateResponse(
        ok=not diagnostics,
        diagnostics=[DiagnosticModel.from_diagnostic(d) for d in diagnostics],
    )


@app.get("/schema.xsd")
def schema_document() -> Response:
    return Response(content=export_xsd_string(builtin_schema()), media_type="application/xml")
