"""entrypoint for ticket-service"""
