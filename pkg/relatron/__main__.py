from relatron import process

process.setup()

from relatron.cli import main

main()
