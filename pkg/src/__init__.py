# Init for src module: adiavac
