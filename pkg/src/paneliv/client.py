"""Service client used by the CLI.

Without a server URL the client mounts the FastAPI app over an in-process
ASGI transport, so CLI invocations need no running server while still
exercising the exact request/response surface a remote client would.
"""

from __future__ import annotations

import asyncio

import httpx


class ServiceError(Exception):
    """A request the service rejected; carries the HTTP detail message."""


class ServiceClient:
    def __init__(self, server: str | None = None):
        self.server = server
        self._app = None
        if server is None:
            from .service.app import create_app

            self._app = create_app()

    def _request(self, method: str, path: str, payload: dict | None) -> dict:
        if self.server is not None:
            with httpx.Client(base_url=self.server, timeout=None) as client:
                response = client.request(method, path, json=payload)
            return self._unwrap(response)

        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(transport=transport, base_url="http://paneliv.local",
                                         timeout=None) as client:
                return await client.request(method, path, json=payload)

        return self._unwrap(asyncio.run(go()))

    @staticmethod
    def _unwrap(response: httpx.Response) -> dict:
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceError(str(detail))
        return response.json()

    def get(self, path: str) -> dict:
        return self._request("GET", path, None)

    def post(self, path: str, payload: dict) -> dict:
        return self._request("POST", path, payload)
