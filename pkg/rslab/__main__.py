from rslab.main import main

main()
