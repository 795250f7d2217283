# python
import sys

from kernel_control.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
