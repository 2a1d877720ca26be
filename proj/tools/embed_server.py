#!/usr/bin/env python3
# Copyright 2026 The PatternRank Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Serves a sentence-transformers model over the patternrank HTTP protocol.

POST /embed  {"texts": [...]}  ->  {"vectors": [[...], ...], "dim": D}

    python3 tools/embed_server.py --model all-mpnet-base-v2 --port 8000
    patternrank eval --backend http:http://127.0.0.1:8000 ...
"""

import argparse
import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
import threading


def make_handler(model, lock):
    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            if self.path.rstrip("/").split("/")[-1] != "embed":
                self.send_error(404)
                return
            try:
                body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
                texts = body["texts"]
                if not all(isinstance(t, str) for t in texts):
                    raise ValueError("texts must be strings")
            except (KeyError, TypeError, ValueError) as e:
                self.send_error(400, str(e))
                return
            with lock:  # the model is not safe to call concurrently
                vectors = model.encode(texts, convert_to_numpy=True)
            payload = json.dumps(
                {"vectors": vectors.tolist(), "dim": int(vectors.shape[1]) if len(texts) else 0}
            ).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, fmt, *args):
            logging.debug(fmt, *args)

    return Handler


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="all-mpnet-base-v2")
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8000)
    ap.add_argument("--device", default=None)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO)

    from sentence_transformers import SentenceTransformer

    model = SentenceTransformer(args.model, device=args.device)
    server = ThreadingHTTPServer((args.host, args.port), make_handler(model, threading.Lock()))
    logging.info("serving %s on http://%s:%d/embed", args.model, args.host, args.port)
    server.serve_forever()


if __name__ == "__main__":
    main()
