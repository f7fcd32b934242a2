from ltlab.cli import main
import sys

sys.exit(main())
