from apps.ghm.main import cli

cli()
