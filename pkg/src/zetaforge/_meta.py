"""Build identity shared by the CLI and every persisted manifest."""

VERSION = "0.1.0"
TABLE_FORMAT = 1
BUILD_ID = f"zeta-forge/{VERSION}+tables.v{TABLE_FORMAT}"
