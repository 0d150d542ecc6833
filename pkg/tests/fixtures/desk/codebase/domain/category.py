class Category:
    pass
