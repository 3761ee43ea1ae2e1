"""Reading and writing scenario files, plus the tools built on them."""
