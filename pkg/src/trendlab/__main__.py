from trendlab.cli import main

raise SystemExit(main())
