from ergokit.cli import main

main()
