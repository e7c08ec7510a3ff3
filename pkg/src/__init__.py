# Formwork Spacing
