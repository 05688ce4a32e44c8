/** Wire shapes of the /v1 JSON API. Field names match the server verbatim. */
export {};
