# Package root so `src.numerics`, `src.model`, `src.optim` and `src.experiments` import from tests and the CLI.
