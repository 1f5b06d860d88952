"""HTTP surface of the sidecar.

  POST /generate  {"prompt": str, "max_tokens": int}
                  -> {"answer": str, "token_probs": [float, ...]}
  POST /embed     {"texts": [str, ...]} -> {"vectors": [[float,...],...], "dim": int}
  GET  /healthz   -> {"status": "ok"}

400 on malformed bodies, 413 when max_tokens or the embed batch exceeds the
configured caps.
"""

from __future__ import annotations

import argparse
import sys

from pydantic import BaseModel

from .backend import Seq2SeqBackend, SidecarConfig


class GenerateRequest(BaseModel):
    prompt: str
    max_tokens: int


class EmbedRequest(BaseModel):
    texts: list[str]


def create_app(config: SidecarConfig):
    from fastapi import FastAPI, Request
    from fastapi.exceptions import RequestValidationError
    from fastapi.responses import JSONResponse

    backend = Seq2SeqBackend(config)
    app = FastAPI()

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc.errors())})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/generate")
    def generate(body: GenerateRequest):
        if body.max_tokens < 1:
            return JSONResponse(status_code=400, content={"detail": "max_tokens must be >= 1"})
        if body.max_tokens > config.max_tokens_cap:
            return JSONResponse(
                status_code=413,
                content={"detail": f"max_tokens exceeds cap {config.max_tokens_cap}"},
            )
        answer, token_probs = backend.generate_greedy(body.prompt, body.max_tokens)
        return {"answer": answer, "token_probs": token_probs}

    @app.post("/embed")
    def embed(body: EmbedRequest):
        if not body.texts:
            return JSONResponse(status_code=400, content={"detail": "texts must be non-empty"})
        if len(body.texts) > config.max_batch_cap:
            return JSONResponse(
                status_code=413,
                content={"detail": f"batch exceeds cap {config.max_batch_cap}"},
            )
        vectors, dim = backend.embed(body.texts)
        return {"vectors": vectors, "dim": dim}

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="lore-sidecar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the inference HTTP server")
    p_serve.add_argument("--model", required=True, help="generator checkpoint name or path")
    p_serve.add_argument("--embedder", default=None, help="embedder checkpoint (default: generator encoder)")
    p_serve.add_argument("--port", type=int, default=8500)
    p_serve.add_argument("--max-tokens-cap", type=int, default=256)

    p_tiny = sub.add_parser("make-tiny-model", help="write a tiny random checkpoint for offline use")
    p_tiny.add_argument("--out", required=True)
    p_tiny.add_argument("--seed", type=int, default=0)
    p_tiny.add_argument("--d-model", type=int, default=64)
    p_tiny.add_argument("--layers", type=int, default=2)

    args = parser.parse_args(argv)
    if args.command == "make-tiny-model":
        from .tiny import build_tiny_model

        path = build_tiny_model(args.out, seed=args.seed, d_model=args.d_model, num_layers=args.layers)
        print(path)
        return 0

    import uvicorn

    config = SidecarConfig(
        generator_model_name=args.model,
        embedder_model_name=args.embedder,
        port=args.port,
        max_tokens_cap=args.max_tokens_cap,
    )
    app = create_app(config)
    uvicorn.run(app, host="0.0.0.0", port=config.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
